//! Hermitian eigensolver, SVD, operator norm and polar decomposition.
//!
//! The eigensolver is cyclic complex Jacobi. The SVD is derived from the
//! eigendecomposition of the smaller Gram matrix; left vectors are
//! recovered as `A v / σ` above a relative cutoff and completed to an
//! orthonormal set by Gram–Schmidt against the standard basis.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::math;
use crate::matrix::{c64, dot, vec_norm, ComplexMatrix, C64};

/// Relative tolerance on `‖A − A*‖` for Hermitian inputs.
pub const HERM_TOL: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius mass drops below this
/// fraction of `‖A‖_F`.
pub const JACOBI_OFF_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 60;
/// Singular values below this fraction of `σ_max` get completed left
/// vectors instead of recovered ones.
pub const SVD_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let q = &self.eigenvectors;
        &(q * &ComplexMatrix::diag_real(&self.eigenvalues)) * &q.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

#[derive(Clone, Debug)]
pub struct SingularDecomposition {
    /// Descending, non-negative; `min(rows, cols)` of them.
    pub singular_values: Vec<f64>,
    /// `rows × p` with orthonormal columns.
    pub left: ComplexMatrix,
    /// `cols × p` with orthonormal columns.
    pub right: ComplexMatrix,
}

impl SingularDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let s: Vec<C64> = self.singular_values.iter().map(|&x| c64(x, 0.0)).collect();
        &(&self.left * &ComplexMatrix::diag(&s)) * &self.right.adjoint()
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        bail!(Dimension, "Hermitian eigenproblem needs a square matrix, got {}x{}", a.rows(), a.cols());
    }
    let scale = a.frobenius_norm();
    let res = a.hermiticity_residual();
    if res > HERM_TOL * scale {
        bail!(Contract, "matrix is not Hermitian: ‖A − A*‖ = {res:e} vs ‖A‖ = {scale:e}");
    }
    Ok(())
}

/// Runs cyclic Jacobi on a Hermitian matrix held row-major in `a`.
/// Returns the diagonal; accumulates rotations into `v` when given.
fn jacobi(a: &mut [C64], n: usize, mut v: Option<&mut [C64]>) -> Result<Vec<f64>> {
    let scale = math::sqrt(a.iter().map(|z| z.norm_sqr()).sum());
    let threshold = JACOBI_OFF_TOL * scale;
    let off = |a: &[C64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[i * n + j].norm_sqr();
                }
            }
        }
        math::sqrt(acc)
    };

    let mut sweeps = 0;
    while off(a) > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            bail!(Numeric, "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (n = {n})");
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + math::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + math::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane.
                let gpp = c64(c, 0.0);
                let gpq = c64(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * gpp + akq * gqp;
                    a[k * n + q] = akp * gpq + akq * gqq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[q * n + k] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[p * n + q] = C64::default();
                a[q * n + p] = C64::default();
                a[p * n + p] = c64(app - t * r, 0.0);
                a[q * n + q] = c64(aqq + t * r, 0.0);

                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * gpp + vkq * gqp;
                        v[k * n + q] = vkp * gpq + vkq * gqq;
                    }
                }
            }
        }
    }
    Ok((0..n).map(|i| a[i * n + i].re).collect())
}

fn symmetrized(a: &ComplexMatrix) -> Vec<C64> {
    a.hermitian_part().into_vec()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Each eigenvector is phase-normalized so that its first
/// largest-modulus component is real and positive.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    check_hermitian(a)?;
    let n = a.rows();
    let mut work = symmetrized(a);
    let mut v = ComplexMatrix::identity(n).into_vec();
    let diag = jacobi(&mut work, n, Some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: Vec<C64> = (0..n).map(|k| v[k * n + src]).collect();
        normalize_phase(&mut col);
        eigenvectors.set_column(dst, &col);
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

fn normalize_phase(col: &mut [C64]) {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(pivot) = col.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        let rot = pivot.conj() / pivot.norm();
        for z in col.iter_mut() {
            *z *= rot;
        }
    }
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let mut work = symmetrized(a);
    let mut values = jacobi(&mut work, a.rows(), None)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Largest eigenvalue of a Hermitian matrix that is trusted to be
/// Hermitian (no precondition check). Closed forms for `n ≤ 2`.
fn max_eigenvalue_trusted(h: &ComplexMatrix) -> Result<f64> {
    match h.rows() {
        1 => Ok(h[(0, 0)].re),
        2 => {
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let b = (h[(0, 1)] + h[(1, 0)].conj()) * 0.5;
            Ok(0.5 * (a + d) + math::hypot(0.5 * (a - d), b.norm()))
        }
        n => {
            let mut work = symmetrized(h);
            let values = jacobi(&mut work, n, None)?;
            Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
        }
    }
}

/// Gram matrix of the smaller side: `A*A` when `A` is tall, else `AA*`.
fn small_gram(a: &ComplexMatrix) -> ComplexMatrix {
    if a.cols() <= a.rows() {
        &a.adjoint() * a
    } else {
        a * &a.adjoint()
    }
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    let gram = small_gram(a);
    // The Gram matrix is Hermitian by construction and Jacobi on matrices
    // this small converges well inside the sweep limit.
    let top = max_eigenvalue_trusted(&gram).expect("Jacobi on a Gram matrix");
    math::sqrt(top.max(0.0))
}

/// Appends unit vectors to an orthonormal set until it spans `C^dim`,
/// drawing candidates from the standard basis.
pub fn complete_orthonormal(mut basis: Vec<Vec<C64>>, dim: usize) -> Vec<Vec<C64>> {
    while basis.len() < dim {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for e in 0..dim {
            let mut cand = vec![C64::default(); dim];
            cand[e] = c64(1.0, 0.0);
            orthogonalize(&mut cand, &basis);
            orthogonalize(&mut cand, &basis);
            let nrm = vec_norm(&cand);
            if best.as_ref().is_none_or(|(b, _)| nrm > *b + 1e-12) {
                best = Some((nrm, cand));
            }
        }
        let (nrm, mut v) = best.expect("dim > 0");
        for z in v.iter_mut() {
            *z /= nrm;
        }
        basis.push(v);
    }
    basis
}

fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) {
    for b in basis {
        let proj = dot(b, v);
        for (x, y) in v.iter_mut().zip(b) {
            *x -= proj * y;
        }
    }
}

/// Singular value decomposition via the Gram matrix eigendecomposition.
pub fn svd(a: &ComplexMatrix) -> Result<SingularDecomposition> {
    if a.rows() < a.cols() {
        let t = svd(&a.adjoint())?;
        return Ok(SingularDecomposition {
            singular_values: t.singular_values,
            left: t.right,
            right: t.left,
        });
    }
    let (m, p) = (a.rows(), a.cols());
    let gram = (&a.adjoint() * a).hermitian_part();
    let eig = hermitian_eig(&gram)?;

    // σ_i = ‖A v_i‖ is accurate to ε‖A‖, unlike sqrt(λ_i) which loses
    // half the digits for small singular values.
    let mut pairs: Vec<(f64, Vec<C64>, Vec<C64>)> = (0..p)
        .rev()
        .map(|j| {
            let v = eig.eigenvectors.column(j);
            let b = crate::matrix::apply(a, &v);
            (vec_norm(&b), v, b)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let sigma: Vec<f64> = pairs.iter().map(|t| t.0).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);

    let mut left_cols: Vec<Vec<C64>> = Vec::with_capacity(p);
    let mut slot: Vec<Option<usize>> = vec![None; p];
    for (i, (s, _, b)) in pairs.iter().enumerate() {
        if smax == 0.0 || *s <= SVD_CUTOFF * smax {
            break;
        }
        let mut u: Vec<C64> = b.iter().map(|z| z / s).collect();
        orthogonalize(&mut u, &left_cols);
        orthogonalize(&mut u, &left_cols);
        let nrm = vec_norm(&u);
        if nrm < 0.5 {
            continue;
        }
        for z in u.iter_mut() {
            *z /= nrm;
        }
        slot[i] = Some(left_cols.len());
        left_cols.push(u);
    }
    let right_cols: Vec<Vec<C64>> = pairs.into_iter().map(|t| t.1).collect();
    let recovered = left_cols.len();
    let full = complete_orthonormal(left_cols, m);
    let mut extra = recovered;
    let mut left = ComplexMatrix::zeros(m, p);
    for (i, s) in slot.iter().enumerate() {
        let idx = match s {
            Some(k) => *k,
            None => {
                extra += 1;
                extra - 1
            }
        };
        left.set_column(i, &full[idx]);
    }
    Ok(SingularDecomposition {
        singular_values: sigma,
        left,
        right: ComplexMatrix::from_columns(&right_cols),
    })
}

/// Polar decomposition `A = W P` with `W` unitary and `P ⪰ 0`.
///
/// Rank-deficient inputs get a unitary `W`: the missing left singular
/// directions come from the orthonormal completion in [`svd`].
pub fn polar_decompose(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_square() {
        bail!(Dimension, "polar decomposition needs a square matrix, got {}x{}", a.rows(), a.cols());
    }
    let d = svd(a)?;
    let v_star = d.right.adjoint();
    let w = &d.left * &v_star;
    let s: Vec<f64> = d.singular_values.clone();
    let p = (&(&d.right * &ComplexMatrix::diag_real(&s)) * &v_star).hermitian_part();
    Ok((w, p))
}

/// Spectral decomposition of a normal matrix: `C = Q diag(λ) Q*`.
///
/// Diagonalizes `H + tK` (with `C = H + iK`) for a few irrational `t`
/// and accepts the first `Q` whose residual is below `1e-9 · ‖C‖_F`.
pub fn normal_eig(c: &ComplexMatrix) -> Result<(Vec<C64>, ComplexMatrix)> {
    if !c.is_square() {
        bail!(Dimension, "spectrum needs a square matrix, got {}x{}", c.rows(), c.cols());
    }
    let n = c.rows();
    let scale = c.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![C64::default(); n], ComplexMatrix::identity(n)));
    }
    let h = c.hermitian_part();
    let k = c.skew_hermitian_part();
    const MIXES: [f64; 5] = [
        0.618_033_988_749_894_9,
        0.414_213_562_373_095_03,
        1.732_050_807_568_877_2,
        0.141_592_653_589_793_12,
        core::f64::consts::E,
    ];
    let mut best = f64::INFINITY;
    for t in MIXES {
        let m = &h + &k.scale_real(t);
        let eig = hermitian_eig(&m)?;
        let q = eig.eigenvectors;
        let d = &(&q.adjoint() * c) * &q;
        let values: Vec<C64> = (0..n).map(|i| d[(i, i)]).collect();
        let recon = &(&q * &ComplexMatrix::diag(&values)) * &q.adjoint();
        let res = (c - &recon).frobenius_norm();
        if res <= 1e-9 * scale {
            return Ok((values, q));
        }
        best = best.min(res);
    }
    bail!(Numeric, "could not diagonalize normal matrix (best residual {best:e})")
}

/// `P^{-1/2}` for a positive definite `P`, with its smallest and largest
/// eigenvalues.
pub fn inverse_sqrt_psd(p: &ComplexMatrix) -> Result<(ComplexMatrix, f64, f64)> {
    let eig = hermitian_eig(p)?;
    let (lo, hi) = (eig.min(), eig.max());
    if lo <= 0.0 {
        bail!(Contract, "matrix is not positive definite (min eigenvalue {lo:e})");
    }
    let inv: Vec<f64> = eig.eigenvalues.iter().map(|&l| 1.0 / math::sqrt(l)).collect();
    let q = &eig.eigenvectors;
    let out = (&(q * &ComplexMatrix::diag_real(&inv)) * &q.adjoint()).hermitian_part();
    Ok((out, lo, hi))
}
