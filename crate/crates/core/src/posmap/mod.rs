//! Linear maps `Φ: M_k → M_d` in Kraus, Choi or superoperator form.
//!
//! Conventions:
//!
//! - Kraus: `Φ(X) = Σ_i K_i X K_i*` with each `K_i` of size `d × k`.
//! - Choi: `J = Σ_ij E_ij ⊗ Φ(E_ij)`, so block `(i, j)` of the `kd × kd`
//!   matrix is `Φ(E_ij)`.
//! - Superoperator: the `d² × k²` matrix acting on column-major
//!   vectorizations, `vec(Φ(X)) = S vec(X)`; for a Kraus map
//!   `S = Σ_i conj(K_i) ⊗ K_i`.

mod positivity;

use alloc::format;
use alloc::vec::Vec;

pub use positivity::{
    cp_test, n_positivity_search, NPositivityVerdict, PositivityStatus, SchmidtWitness, CHOI_PSD_TOL,
    DEFAULT_MAX_ITERS, DEFAULT_STARTS, WITNESS_TOL,
};

use crate::error::{bail, Error, Result};
use crate::linalg::{hermitian_eig, inverse_sqrt_psd, operator_norm};
use crate::matrix::{c64, ComplexMatrix, C64};
use crate::random;

/// Kraus vectors with eigenvalue below this fraction of `‖J‖` are dropped.
pub const KRAUS_CUTOFF: f64 = 1e-11;
/// `Φ(I)` must have `λ_min > UNITALIZE_TOL · λ_max` to be unitalized.
pub const UNITALIZE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum MapForm {
    Kraus(Vec<ComplexMatrix>),
    Choi(ComplexMatrix),
    Superop(ComplexMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapRep {
    in_dim: usize,
    out_dim: usize,
    form: MapForm,
}

impl MapRep {
    pub fn from_kraus(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = ops.first() else {
            bail!(Contract, "Kraus form needs at least one operator");
        };
        let (d, k) = (first.rows(), first.cols());
        if let Some(bad) = ops.iter().position(|op| op.rows() != d || op.cols() != k) {
            bail!(
                Dimension,
                "Kraus operator {bad} is {}x{}, expected {d}x{k}",
                ops[bad].rows(),
                ops[bad].cols()
            );
        }
        Ok(Self { in_dim: k, out_dim: d, form: MapForm::Kraus(ops) })
    }

    pub fn from_choi(in_dim: usize, out_dim: usize, choi: ComplexMatrix) -> Result<Self> {
        let n = in_dim * out_dim;
        if in_dim == 0 || out_dim == 0 || choi.rows() != n || choi.cols() != n {
            bail!(
                Dimension,
                "Choi matrix for M_{in_dim} -> M_{out_dim} must be {n}x{n}, got {}x{}",
                choi.rows(),
                choi.cols()
            );
        }
        Ok(Self { in_dim, out_dim, form: MapForm::Choi(choi) })
    }

    pub fn from_superop(in_dim: usize, out_dim: usize, superop: ComplexMatrix) -> Result<Self> {
        if superop.rows() != out_dim * out_dim || superop.cols() != in_dim * in_dim {
            bail!(
                Dimension,
                "superoperator for M_{in_dim} -> M_{out_dim} must be {}x{}, got {}x{}",
                out_dim * out_dim,
                in_dim * in_dim,
                superop.rows(),
                superop.cols()
            );
        }
        Ok(Self { in_dim, out_dim, form: MapForm::Superop(superop) })
    }

    /// Choi form of the linear map defined by its action on matrix units.
    pub fn from_fn(in_dim: usize, out_dim: usize, mut f: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let mut choi = ComplexMatrix::zeros(in_dim * out_dim, in_dim * out_dim);
        for i in 0..in_dim {
            for j in 0..in_dim {
                let image = f(&ComplexMatrix::unit(in_dim, i, j));
                debug_assert_eq!((image.rows(), image.cols()), (out_dim, out_dim));
                choi.embed_block(i * out_dim, j * out_dim, &image).expect("block fits");
            }
        }
        Self { in_dim, out_dim, form: MapForm::Choi(choi) }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn form(&self) -> &MapForm {
        &self.form
    }

    pub fn kraus_ops(&self) -> Option<&[ComplexMatrix]> {
        match &self.form {
            MapForm::Kraus(ops) => Some(ops),
            _ => None,
        }
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.in_dim || x.cols() != self.in_dim {
            bail!(
                Dimension,
                "map acts on {0}x{0} matrices, got {1}x{2}",
                self.in_dim,
                x.rows(),
                x.cols()
            );
        }
        let (k, d) = (self.in_dim, self.out_dim);
        Ok(match &self.form {
            MapForm::Kraus(ops) => {
                let mut out = ComplexMatrix::zeros(d, d);
                for op in ops {
                    out = &out + &(&(op * x) * &op.adjoint());
                }
                out
            }
            MapForm::Choi(j) => {
                let mut out = ComplexMatrix::zeros(d, d);
                for a in 0..k {
                    for b in 0..k {
                        let w = x[(a, b)];
                        if w == C64::default() {
                            continue;
                        }
                        for al in 0..d {
                            for be in 0..d {
                                out[(al, be)] += w * j[(a * d + al, b * d + be)];
                            }
                        }
                    }
                }
                out
            }
            MapForm::Superop(s) => {
                let mut out = ComplexMatrix::zeros(d, d);
                for al in 0..d {
                    for be in 0..d {
                        let row = al + be * d;
                        let mut acc = C64::default();
                        for a in 0..k {
                            for b in 0..k {
                                acc += s[(row, a + b * k)] * x[(a, b)];
                            }
                        }
                        out[(al, be)] = acc;
                    }
                }
                out
            }
        })
    }

    /// `J = Σ_ij E_ij ⊗ Φ(E_ij)`.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        match &self.form {
            MapForm::Choi(j) => j.clone(),
            MapForm::Kraus(ops) => {
                let (k, d) = (self.in_dim, self.out_dim);
                let mut j = ComplexMatrix::zeros(k * d, k * d);
                for op in ops {
                    let w: Vec<C64> = (0..k * d).map(|idx| op[(idx % d, idx / d)]).collect();
                    j = &j + &ComplexMatrix::outer(&w, &w);
                }
                j
            }
            MapForm::Superop(_) => match Self::from_fn(self.in_dim, self.out_dim, |e| self.apply(e).expect("dims")).form {
                MapForm::Choi(j) => j,
                _ => unreachable!(),
            },
        }
    }

    pub fn superop_matrix(&self) -> ComplexMatrix {
        match &self.form {
            MapForm::Superop(s) => s.clone(),
            MapForm::Kraus(ops) => {
                let (k, d) = (self.in_dim, self.out_dim);
                let mut s = ComplexMatrix::zeros(d * d, k * k);
                for op in ops {
                    s = &s + &op.conj().kron(op);
                }
                s
            }
            MapForm::Choi(_) => {
                let (k, d) = (self.in_dim, self.out_dim);
                let mut s = ComplexMatrix::zeros(d * d, k * k);
                for a in 0..k {
                    for b in 0..k {
                        let image = self.apply(&ComplexMatrix::unit(k, a, b)).expect("dims");
                        for al in 0..d {
                            for be in 0..d {
                                s[(al + be * d, a + b * k)] = image[(al, be)];
                            }
                        }
                    }
                }
                s
            }
        }
    }

    pub fn to_choi(&self) -> Self {
        Self { in_dim: self.in_dim, out_dim: self.out_dim, form: MapForm::Choi(self.choi_matrix()) }
    }

    pub fn as_superop(&self) -> Self {
        Self { in_dim: self.in_dim, out_dim: self.out_dim, form: MapForm::Superop(self.superop_matrix()) }
    }

    /// Kraus form from the spectral decomposition of the Choi matrix.
    ///
    /// Eigenvalues in `[−1e-9, 1e-11·‖J‖]` are dropped; anything more
    /// negative is a [`Error::NotCompletelyPositive`].
    pub fn to_kraus(&self) -> Result<Self> {
        let (k, d) = (self.in_dim, self.out_dim);
        let j = self.choi_matrix();
        let eig = hermitian_eig(&j).map_err(|e| match e {
            Error::Contract(_) => Error::Contract(format!("Choi matrix is not Hermitian: {e}")),
            other => other,
        })?;
        if eig.min() < -CHOI_PSD_TOL {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: eig.min() });
        }
        let scale = eig.min().abs().max(eig.max().abs());
        let mut ops = Vec::new();
        for idx in (0..k * d).rev() {
            let lambda = eig.eigenvalues[idx];
            if lambda <= KRAUS_CUTOFF * scale || lambda <= 0.0 {
                continue;
            }
            let s = crate::math::sqrt(lambda);
            let v = eig.eigenvectors.column(idx);
            ops.push(ComplexMatrix::from_fn(d, k, |al, i| v[i * d + al] * s));
        }
        if ops.is_empty() {
            ops.push(ComplexMatrix::zeros(d, k));
        }
        Self::from_kraus(ops)
    }

    /// `Φ_n` on `M_n(M_k) ≅ M_{nk}`: blockwise application.
    pub fn amplify(&self, n: usize) -> Result<Self> {
        if n == 0 {
            bail!(Contract, "amplification order must be at least 1");
        }
        if n == 1 {
            return Ok(self.clone());
        }
        if let MapForm::Kraus(ops) = &self.form {
            let id = ComplexMatrix::identity(n);
            return Self::from_kraus(ops.iter().map(|op| id.kron(op)).collect());
        }
        let (k, d) = (self.in_dim, self.out_dim);
        Ok(Self::from_fn(n * k, n * d, |x| apply_blockwise(self, x, n).expect("dims")))
    }

    /// `Φ(I)`.
    pub fn image_of_identity(&self) -> ComplexMatrix {
        self.apply(&ComplexMatrix::identity(self.in_dim)).expect("dims")
    }

    /// `‖Φ(I) − I‖`; zero for unital maps. Infinite when the map changes
    /// dimension.
    pub fn unital_residual(&self) -> f64 {
        if self.in_dim != self.out_dim {
            return f64::INFINITY;
        }
        operator_norm(&(&self.image_of_identity() - &ComplexMatrix::identity(self.out_dim)))
    }

    /// `Φ'(X) = S^{-1/2} Φ(X) S^{-1/2}` with `S = Φ(I)`.
    pub fn unitalize(&self) -> Result<Self> {
        let s = self.image_of_identity();
        if s.hermiticity_residual() > 1e-10 * s.frobenius_norm().max(f64::MIN_POSITIVE) {
            bail!(Unitalization, "Φ(I) is not Hermitian");
        }
        let (r, lo, hi) = inverse_sqrt_psd(&s).map_err(|_| Error::Unitalization("Φ(I) is not positive definite".into()))?;
        if lo <= UNITALIZE_TOL * hi {
            bail!(Unitalization, "Φ(I) is singular: eigenvalues in [{lo:e}, {hi:e}]");
        }
        let (k, d) = (self.in_dim, self.out_dim);
        match &self.form {
            MapForm::Kraus(ops) => Self::from_kraus(ops.iter().map(|op| &r * op).collect()),
            _ => {
                let lift = ComplexMatrix::identity(k).kron(&r);
                Self::from_choi(k, d, &(&lift * &self.choi_matrix()) * &lift)
            }
        }
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.in_dim != inner.out_dim {
            bail!(
                Dimension,
                "cannot compose: inner map lands in M_{}, outer acts on M_{}",
                inner.out_dim,
                outer.in_dim
            );
        }
        if let (MapForm::Kraus(o), MapForm::Kraus(i)) = (&outer.form, &inner.form) {
            let mut ops = Vec::with_capacity(o.len() * i.len());
            for a in o {
                for b in i {
                    ops.push(a * b);
                }
            }
            return Self::from_kraus(ops);
        }
        Self::from_superop(inner.in_dim, outer.out_dim, &outer.superop_matrix() * &inner.superop_matrix())
    }

    /// `Σ w_i Φ_i` for non-negative weights summing to one.
    pub fn convex_mix(parts: &[(f64, &Self)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            bail!(Contract, "empty mixture");
        };
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            bail!(Contract, "mixture weights must be non-negative and sum to 1 (sum {total})");
        }
        let (k, d) = (first.in_dim, first.out_dim);
        let mut j = ComplexMatrix::zeros(k * d, k * d);
        for (w, m) in parts {
            if m.in_dim != k || m.out_dim != d {
                bail!(Dimension, "mixture components act between different algebras");
            }
            j = &j + &m.choi_matrix().scale_real(*w);
        }
        Self::from_choi(k, d, j)
    }
}

fn apply_blockwise(map: &MapRep, x: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let (k, d) = (map.in_dim, map.out_dim);
    let mut out = ComplexMatrix::zeros(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            let block = x.block(i * k, j * k, k, k)?;
            out.embed_block(i * d, j * d, &map.apply(&block)?)?;
        }
    }
    Ok(out)
}

/// Built-in maps.
#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    Identity { dim: usize },
    Transpose { dim: usize },
    /// `T ↦ (k−1) tr(T) I − T`.
    ChoiMap { dim: usize },
    /// Choi's map divided by `k² − k − 1`, which makes it unital.
    NormalizedChoiMap { dim: usize },
    UnitaryConj { u: ComplexMatrix },
    /// Random Ginibre Kraus operators, then [`MapRep::unitalize`].
    RandomUnitalCp { dim: usize, kraus_rank: usize, seed: u64 },
}

impl Builtin {
    pub fn build(&self) -> Result<MapRep> {
        match self {
            Builtin::Identity { dim } => {
                require_dim(*dim, 1)?;
                MapRep::from_kraus(alloc::vec![ComplexMatrix::identity(*dim)])
            }
            Builtin::Transpose { dim } => transpose(*dim),
            Builtin::ChoiMap { dim } => choi_map(*dim),
            Builtin::NormalizedChoiMap { dim } => normalized_choi_map(*dim),
            Builtin::UnitaryConj { u } => unitary_conj(u.clone()),
            Builtin::RandomUnitalCp { dim, kraus_rank, seed } => random_unital_cp(*dim, *kraus_rank, *seed),
        }
    }
}

fn require_dim(k: usize, min: usize) -> Result<()> {
    if k < min {
        bail!(Contract, "dimension must be at least {min}, got {k}");
    }
    Ok(())
}

pub fn transpose(k: usize) -> Result<MapRep> {
    require_dim(k, 2)?;
    Ok(MapRep::from_fn(k, k, |x| x.transpose()))
}

fn scaled_choi_map(k: usize, scale: f64) -> MapRep {
    // J = (k−1) I ⊗ I − Σ E_ij ⊗ E_ij.
    let n = k * k;
    let mut j = ComplexMatrix::identity(n).scale_real((k as f64 - 1.0) * scale);
    for a in 0..k {
        for b in 0..k {
            j[(a * k + a, b * k + b)] -= c64(scale, 0.0);
        }
    }
    MapRep::from_choi(k, k, j).expect("square")
}

pub fn choi_map(k: usize) -> Result<MapRep> {
    require_dim(k, 2)?;
    Ok(scaled_choi_map(k, 1.0))
}

pub fn normalized_choi_map(k: usize) -> Result<MapRep> {
    require_dim(k, 2)?;
    let kf = k as f64;
    Ok(scaled_choi_map(k, 1.0 / (kf * kf - kf - 1.0)))
}

pub fn unitary_conj(u: ComplexMatrix) -> Result<MapRep> {
    if !u.is_square() {
        bail!(Dimension, "unitary must be square, got {}x{}", u.rows(), u.cols());
    }
    let defect = (&(&u.adjoint() * &u) - &ComplexMatrix::identity(u.rows())).max_abs();
    if defect > 1e-9 {
        bail!(Contract, "matrix is not unitary (‖U*U − I‖_max = {defect:e})");
    }
    MapRep::from_kraus(alloc::vec![u])
}

pub fn random_unital_cp(k: usize, kraus_rank: usize, seed: u64) -> Result<MapRep> {
    require_dim(k, 2)?;
    if kraus_rank == 0 {
        bail!(Contract, "Kraus rank must be at least 1");
    }
    let mut rng = random::rng(seed);
    let ops = (0..kraus_rank).map(|_| random::ginibre(k, k, &mut rng)).collect();
    MapRep::from_kraus(ops)?.unitalize()
}

#[cfg(feature = "serde")]
impl serde::Serialize for MapRep {
    /// `{"kind":"kraus","ops":[...]}` or `{"kind":"choi","inDim":k,"outDim":d,"matrix":...}`;
    /// superoperators are written in Choi form.
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        match &self.form {
            MapForm::Kraus(ops) => {
                m.serialize_entry("kind", "kraus")?;
                m.serialize_entry("ops", ops)?;
            }
            _ => {
                m.serialize_entry("kind", "choi")?;
                m.serialize_entry("inDim", &self.in_dim)?;
                m.serialize_entry("outDim", &self.out_dim)?;
                m.serialize_entry("matrix", &self.choi_matrix())?;
            }
        }
        m.end()
    }
}
