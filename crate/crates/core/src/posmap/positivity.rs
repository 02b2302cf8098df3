//! Complete positivity and n-positivity.
//!
//! `Φ: M_k → M_d` is n-positive exactly when `⟨x, J x⟩ ≥ 0` for every
//! vector `x ∈ C^k ⊗ C^d` of Schmidt rank at most `n`, where `J` is the
//! Choi matrix (the Choi–Jamiołkowski / Schmidt-number criterion; see
//! M.-D. Choi, Canad. J. Math. 24 (1972), and B. Terhal and P. Horodecki,
//! Phys. Rev. A 61, 040301 (2000)). For `n ≥ min(k, d)` every vector
//! qualifies, the condition is `J ⪰ 0` and the answer is exact.
//!
//! Below that rank the minimum is searched by alternating minimization
//! over `x = Σ_{r≤n} a_r ⊗ b_r`. A negative value is a checkable
//! certificate; failing to find one is only evidence.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::MapRep;
use crate::error::{bail, Error, Result};
use crate::linalg::{complete_orthonormal, hermitian_eig, svd};
use crate::matrix::{dot, vec_norm, ComplexMatrix, C64};
use crate::random;

/// A Rayleigh value at or below `-WITNESS_TOL` certifies failure.
pub const WITNESS_TOL: f64 = 1e-8;
/// Choi eigenvalues at or above `-CHOI_PSD_TOL` count as non-negative.
pub const CHOI_PSD_TOL: f64 = 1e-9;
pub const DEFAULT_STARTS: usize = 50;
pub const DEFAULT_MAX_ITERS: usize = 200;
/// Alternation stops once a full round changes the value by less.
const STALL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PositivityStatus {
    CertifiedNotNPositive,
    HeuristicallyNPositive,
    CertifiedCp,
}

/// `x = Σ_r a_r ⊗ b_r` with `a_r ∈ C^k` (input side) and `b_r ∈ C^d`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SchmidtWitness {
    pub a: Vec<Vec<C64>>,
    pub b: Vec<Vec<C64>>,
}

impl SchmidtWitness {
    /// Number of product terms, an upper bound on the Schmidt rank.
    pub fn terms(&self) -> usize {
        self.a.len()
    }

    /// The vector in `C^k ⊗ C^d`, index `i·d + α`.
    pub fn vector(&self) -> Vec<C64> {
        let k = self.a.first().map_or(0, |v| v.len());
        let d = self.b.first().map_or(0, |v| v.len());
        let mut x = vec![C64::default(); k * d];
        for (a, b) in self.a.iter().zip(&self.b) {
            for i in 0..k {
                for al in 0..d {
                    x[i * d + al] += a[i] * b[al];
                }
            }
        }
        x
    }

    /// `⟨x, J x⟩` (real part; `J` is Hermitian).
    pub fn rayleigh(&self, choi: &ComplexMatrix) -> f64 {
        let x = self.vector();
        dot(&x, &crate::matrix::apply(choi, &x)).re
    }

    /// Schmidt decomposition of `x ∈ C^k ⊗ C^d`, keeping coefficients
    /// above `1e-12 · max`.
    pub fn from_vector(x: &[C64], k: usize, d: usize) -> Result<Self> {
        let mat = ComplexMatrix::from_fn(k, d, |i, al| x[i * d + al]);
        let s = svd(&mat)?;
        let top = s.singular_values.first().copied().unwrap_or(0.0);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (r, &sigma) in s.singular_values.iter().enumerate() {
            if sigma <= 1e-12 * top {
                continue;
            }
            a.push(s.left.column(r).into_iter().map(|z| z * sigma).collect());
            b.push(s.right.column(r).into_iter().map(|z| z.conj()).collect());
        }
        Ok(Self { a, b })
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct NPositivityVerdict {
    pub n: usize,
    pub status: PositivityStatus,
    /// Smallest `⟨x, J x⟩` found over unit `x` of Schmidt rank `≤ n`.
    pub min_value_found: f64,
    pub witness: Option<SchmidtWitness>,
    pub starts: usize,
}

fn hermitian_choi(map: &MapRep) -> Result<ComplexMatrix> {
    let j = map.choi_matrix();
    if j.hermiticity_residual() > 1e-10 * j.frobenius_norm() {
        bail!(
            Contract,
            "Choi matrix is not Hermitian, so the map does not preserve adjoints and cannot be positive"
        );
    }
    Ok(j.hermitian_part())
}

/// Exact verdict from the spectrum of `J`, valid for `n ≥ min(k, d)`.
fn spectral_verdict(map: &MapRep, n: usize, choi: &ComplexMatrix) -> Result<NPositivityVerdict> {
    let eig = hermitian_eig(choi)?;
    let lambda = eig.min();
    if lambda >= -CHOI_PSD_TOL {
        return Ok(NPositivityVerdict {
            n,
            status: PositivityStatus::CertifiedCp,
            min_value_found: lambda,
            witness: None,
            starts: 0,
        });
    }
    let witness = SchmidtWitness::from_vector(&eig.eigenvectors.column(0), map.in_dim(), map.out_dim())?;
    let value = witness.rayleigh(choi);
    let status = if value <= -WITNESS_TOL {
        PositivityStatus::CertifiedNotNPositive
    } else {
        PositivityStatus::HeuristicallyNPositive
    };
    Ok(NPositivityVerdict {
        n,
        status,
        min_value_found: value,
        witness: (status == PositivityStatus::CertifiedNotNPositive).then_some(witness),
        starts: 0,
    })
}

/// Exact complete-positivity test on the Choi spectrum.
///
/// The verdict's `n` is `min(k, d)`, the order at which n-positivity and
/// complete positivity coincide.
pub fn cp_test(map: &MapRep) -> Result<NPositivityVerdict> {
    let choi = hermitian_choi(map)?;
    spectral_verdict(map, map.in_dim().min(map.out_dim()), &choi)
}

/// Orthonormal basis (as columns) for the span of `cols`, padded from the
/// standard basis when the columns are dependent.
fn orthonormal_columns(cols: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let scale = cols.iter().map(|c| vec_norm(c)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols.len());
    let mut deficient = 0;
    for c in cols {
        let mut v = c.clone();
        for _ in 0..2 {
            for q in &basis {
                let p = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
            }
        }
        let nrm = vec_norm(&v);
        if nrm > 1e-10 * scale {
            v.iter_mut().for_each(|z| *z /= nrm);
            basis.push(v);
        } else {
            deficient += 1;
        }
    }
    let target = basis.len() + deficient;
    complete_orthonormal(basis, target.min(dim))
}

/// Minimizes `⟨x, J x⟩` with one tensor factor's column span fixed.
///
/// `fixed` holds orthonormal columns on the side indicated by
/// `fixed_is_output`; returns the minimum and the free-side columns.
fn half_step(
    choi: &ComplexMatrix,
    k: usize,
    d: usize,
    fixed: &[Vec<C64>],
    fixed_is_output: bool,
) -> Result<(f64, Vec<Vec<C64>>)> {
    let n = fixed.len();
    let free_dim = if fixed_is_output { k } else { d };
    // Columns of the embedding M: free coordinate (f, r) ↦ e_f ⊗ fixed_r or fixed_r ⊗ e_f.
    let mut m = ComplexMatrix::zeros(k * d, free_dim * n);
    for f in 0..free_dim {
        for (r, col) in fixed.iter().enumerate() {
            for (t, z) in col.iter().enumerate() {
                let row = if fixed_is_output { f * d + t } else { t * d + f };
                m[(row, f * n + r)] = *z;
            }
        }
    }
    let reduced = (&(&m.adjoint() * choi) * &m).hermitian_part();
    let eig = hermitian_eig(&reduced)?;
    let v = eig.eigenvectors.column(0);
    let free: Vec<Vec<C64>> = (0..n).map(|r| (0..free_dim).map(|f| v[f * n + r]).collect()).collect();
    Ok((eig.min(), free))
}

struct StartResult {
    value: f64,
    witness: SchmidtWitness,
}

fn alternate(
    choi: &ComplexMatrix,
    k: usize,
    d: usize,
    n: usize,
    max_iters: usize,
    rng: &mut impl Rng,
) -> Result<StartResult> {
    let init: Vec<Vec<C64>> = (0..n).map(|_| random::gaussian_vector(d, rng)).collect();
    let mut b = orthonormal_columns(&init, d);
    let (mut value, mut a) = half_step(choi, k, d, &b, true)?;
    for _ in 0..max_iters {
        let a_basis = orthonormal_columns(&a, k);
        let (_, b_free) = half_step(choi, k, d, &a_basis, false)?;
        let b_basis = orthonormal_columns(&b_free, d);
        let (v, a_free) = half_step(choi, k, d, &b_basis, true)?;
        let stalled = (value - v).abs() < STALL_TOL;
        if v <= value {
            value = v;
            a = a_free;
            b = b_basis;
        }
        if stalled {
            break;
        }
    }
    Ok(StartResult { value, witness: SchmidtWitness { a, b } })
}

/// Searches for a unit vector of Schmidt rank `≤ n` with negative Choi
/// expectation.
///
/// Each start draws its initial output-side span from sub-stream
/// `start` of `seed`, so the verdict does not depend on the order in
/// which starts are evaluated. Ties go to the lowest start index.
pub fn n_positivity_search(
    map: &MapRep,
    n: usize,
    starts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<NPositivityVerdict> {
    if n == 0 {
        bail!(Contract, "positivity order must be at least 1");
    }
    if starts == 0 {
        bail!(Contract, "search needs at least one start");
    }
    let choi = hermitian_choi(map)?;
    let (k, d) = (map.in_dim(), map.out_dim());
    if n >= k.min(d) {
        return spectral_verdict(map, n, &choi);
    }

    let mut best: Option<StartResult> = None;
    for s in 0..starts {
        let mut rng = random::sub_rng(seed, s as u64);
        let res = alternate(&choi, k, d, n, max_iters, &mut rng)?;
        if best.as_ref().is_none_or(|b| res.value < b.value) {
            best = Some(res);
        }
    }
    let best = best.ok_or_else(|| Error::Numeric("no search start completed".into()))?;
    let value = best.witness.rayleigh(&choi);
    let certified = value <= -WITNESS_TOL;
    Ok(NPositivityVerdict {
        n,
        status: if certified {
            PositivityStatus::CertifiedNotNPositive
        } else {
            PositivityStatus::HeuristicallyNPositive
        },
        min_value_found: value,
        witness: certified.then_some(best.witness),
        starts,
    })
}
