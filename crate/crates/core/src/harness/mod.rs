//! The Grüss defect `‖Φ(AB) − Φ(A)Φ(B)‖` and the checks built on it.
//!
//! Every check returns a report with the raw quantities on both sides of
//! its inequality; deciding what counts as a violation is done with the
//! stated relative tolerances and recorded in the report.

mod trials;

pub use trials::{
    explore_two_positive, run_trial, run_trials, summarize, two_positive_config, Check, Family, TrialConfig,
    TrialInstance, TrialOutcome, TrialSummary, CANDIDATE_RATIO,
};

use alloc::vec::Vec;

use crate::distance::{delta, DeltaMethod, DeltaResult};
use crate::error::{bail, Result};
use crate::linalg::{hermitian_eigenvalues, operator_norm};
use crate::matrix::{ComplexMatrix, C64};
use crate::posmap::{
    cp_test, n_positivity_search, normalized_choi_map, transpose, MapRep, PositivityStatus, DEFAULT_MAX_ITERS,
};
use crate::unitary_sum::{decompose_unitary_sum, rescale_for_decomposition, Mode};

/// Relative violation tolerance: a check fails when `lhs > rhs + VIOL_REL_TOL·(1 + rhs)`.
pub const VIOL_REL_TOL: f64 = 1e-8;
/// Allowed `‖Φ(I) − I‖` for checks that need a unital map.
pub const UNITAL_TOL: f64 = 1e-9;
/// Starts used by [`check_lemma2`] when screening a map for positivity.
pub const LEMMA2_POSITIVITY_STARTS: usize = 8;

/// Seed for the spectral-disk route; Welzl's output does not depend on it.
const DELTA_SEED: u64 = 0;

pub fn default_viol_tol(bound: f64) -> f64 {
    VIOL_REL_TOL * (1.0 + bound)
}

fn check_operands(map: &MapRep, ops: &[&ComplexMatrix]) -> Result<()> {
    let k = map.in_dim();
    for op in ops {
        if op.rows() != k || op.cols() != k {
            bail!(Dimension, "operand is {}x{}, map acts on M_{k}", op.rows(), op.cols());
        }
    }
    Ok(())
}

fn require_unital(map: &MapRep) -> Result<()> {
    let r = map.unital_residual();
    if !(r <= UNITAL_TOL) {
        bail!(Contract, "map is not unital: ‖Φ(I) − I‖ = {r:e}");
    }
    Ok(())
}

/// `Φ(AB) − Φ(A)Φ(B)`.
pub fn defect_matrix(map: &MapRep, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_operands(map, &[a, b])?;
    let ab = map.apply(&(a * b))?;
    Ok(&ab - &(&map.apply(a)? * &map.apply(b)?))
}

pub fn gruss_defect(map: &MapRep, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(operator_norm(&defect_matrix(map, a, b)?))
}

/// `‖Φ(A*A) − Φ(A)*Φ(A)‖`.
pub fn variance_defect(map: &MapRep, a: &ComplexMatrix) -> Result<f64> {
    check_operands(map, &[a])?;
    let pa = map.apply(a)?;
    Ok(operator_norm(&(&map.apply(&(&a.adjoint() * a))? - &(&pa.adjoint() * &pa))))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct GrussReport {
    pub defect: f64,
    pub delta_a: DeltaResult,
    pub delta_b: DeltaResult,
    /// `Δ(A)·Δ(B)`.
    pub bound: f64,
    /// `bound − defect`.
    pub margin: f64,
    pub viol_tol: f64,
    pub violated: bool,
}

impl GrussReport {
    /// `defect / bound`, reported as 0 when both vanish.
    pub fn ratio(&self) -> f64 {
        ratio(self.defect, self.bound, self.viol_tol)
    }
}

pub(crate) fn ratio(lhs: f64, rhs: f64, tol: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs <= tol {
        0.0
    } else {
        lhs / 1e-300
    }
}

/// Evaluates `‖Φ(AB) − Φ(A)Φ(B)‖ ≤ Δ(A)Δ(B)` for a unital map. The
/// tolerance defaults to [`default_viol_tol`] of the bound.
pub fn check_theorem(map: &MapRep, a: &ComplexMatrix, b: &ComplexMatrix, viol_tol: Option<f64>) -> Result<GrussReport> {
    require_unital(map)?;
    let defect = gruss_defect(map, a, b)?;
    let delta_a = delta(a, DeltaMethod::Auto, DELTA_SEED)?;
    let delta_b = delta(b, DeltaMethod::Auto, DELTA_SEED)?;
    let bound = delta_a.value * delta_b.value;
    let viol_tol = viol_tol.unwrap_or_else(|| default_viol_tol(bound));
    Ok(GrussReport {
        defect,
        delta_a,
        delta_b,
        bound,
        margin: bound - defect,
        viol_tol,
        violated: defect > bound + viol_tol,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct Lemma1Report {
    /// `‖Φ(AB) − Φ(A)Φ(B)‖²`.
    pub lhs_squared: f64,
    /// `‖Φ(AA*) − Φ(A)Φ(A)*‖ · ‖Φ(B*B) − Φ(B)*Φ(B)‖`.
    pub rhs_product: f64,
    /// Smallest eigenvalue of the covariance block matrix for `(A*, B)`.
    pub block_min_eig: f64,
    pub holds: bool,
}

/// Covariance block matrix
/// `[[Φ(X*X) − Φ(X)*Φ(X), Φ(X*Y) − Φ(X)*Φ(Y)], [·*, Φ(Y*Y) − Φ(Y)*Φ(Y)]]`.
pub fn covariance_block(map: &MapRep, x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_operands(map, &[x, y])?;
    let (px, py) = (map.apply(x)?, map.apply(y)?);
    let cov = |u: &ComplexMatrix, pu: &ComplexMatrix, v: &ComplexMatrix, pv: &ComplexMatrix| -> Result<ComplexMatrix> {
        Ok(&map.apply(&(&u.adjoint() * v))? - &(&pu.adjoint() * pv))
    };
    let xx = cov(x, &px, x, &px)?;
    let xy = cov(x, &px, y, &py)?;
    let yy = cov(y, &py, y, &py)?;
    ComplexMatrix::from_blocks(&[alloc::vec![xx, xy.clone()], alloc::vec![xy.adjoint(), yy]])
}

/// Checks the Cauchy–Schwarz-type bound on the defect and positivity of
/// the covariance block matrix. The map should be at least 3-positive;
/// that is not re-certified here.
pub fn check_lemma1(map: &MapRep, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Lemma1Report> {
    let lhs = gruss_defect(map, a, b)?;
    let lhs_squared = lhs * lhs;
    let a_star = a.adjoint();
    let pa = map.apply(a)?;
    let var_a = operator_norm(&(&map.apply(&(a * &a_star))? - &(&pa * &pa.adjoint())));
    let rhs_product = var_a * variance_defect(map, b)?;
    let block = covariance_block(map, &a_star, b)?.hermitian_part();
    let block_min_eig = hermitian_eigenvalues(&block)?[0];
    Ok(Lemma1Report {
        lhs_squared,
        rhs_product,
        block_min_eig,
        holds: lhs_squared <= rhs_product + VIOL_REL_TOL * (1.0 + rhs_product) && block_min_eig >= -VIOL_REL_TOL,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct Lemma2Report {
    /// `‖Φ(A*A) − Φ(A)*Φ(A)‖`.
    pub lhs: f64,
    pub delta: DeltaResult,
    /// `Δ(A)²`.
    pub rhs: f64,
    pub normal: bool,
    pub holds: bool,
}

/// Checks `‖Φ(A*A) − Φ(A)*Φ(A)‖ ≤ Δ(A)²` for a unital positive map.
///
/// With `require_normal` the operator must be normal. Without it the map
/// must be certified CP, the only setting where arbitrary `A` is claimed.
/// Positivity is screened with a rank-one witness search.
pub fn check_lemma2(map: &MapRep, a: &ComplexMatrix, require_normal: bool) -> Result<Lemma2Report> {
    check_operands(map, &[a])?;
    require_unital(map)?;
    let norm = operator_norm(a);
    let normal = a.normality_residual() <= 1e-9 * norm * norm;
    if require_normal {
        if !normal {
            bail!(Contract, "operator is not normal: ‖AA* − A*A‖ = {:e}", a.normality_residual());
        }
        let screen = n_positivity_search(map, 1, LEMMA2_POSITIVITY_STARTS, DEFAULT_MAX_ITERS, 0)?;
        if screen.status == PositivityStatus::CertifiedNotNPositive {
            bail!(Contract, "map is not positive (witness value {:e})", screen.min_value_found);
        }
    } else {
        let cp = cp_test(map)?;
        if cp.status != PositivityStatus::CertifiedCp {
            bail!(Contract, "non-normal operators are only allowed for CP maps");
        }
    }
    let lhs = variance_defect(map, a)?;
    let delta = delta(a, DeltaMethod::Auto, DELTA_SEED)?;
    let rhs = delta.value * delta.value;
    Ok(Lemma2Report { lhs, rhs, normal, holds: lhs <= rhs + VIOL_REL_TOL * (1.0 + rhs), delta })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct CounterexampleReport {
    pub defect: f64,
    pub bound: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub inequality_fails: bool,
    /// `Φ(AB) − Φ(A)Φ(B)`.
    pub defect_matrix: ComplexMatrix,
}

pub fn counterexample_inputs() -> (MapRep, ComplexMatrix, ComplexMatrix) {
    (
        transpose(2).expect("dim 2"),
        ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]),
        ComplexMatrix::diag_real(&[1.0, 4.0]),
    )
}

/// The transpose map on `M_2` with `A = [[1,2],[2,4]]`, `B = diag(1,4)`.
pub fn reproduce_counterexample() -> CounterexampleReport {
    let (map, a, b) = counterexample_inputs();
    let report = check_theorem(&map, &a, &b, None).expect("fixed inputs");
    CounterexampleReport {
        defect: report.defect,
        bound: report.bound,
        delta_a: report.delta_a.value,
        delta_b: report.delta_b.value,
        inequality_fails: report.violated,
        defect_matrix: defect_matrix(&map, &a, &b).expect("fixed inputs"),
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct CorollaryReport {
    pub k: usize,
    /// Norm of the trace bracket.
    pub lhs: f64,
    /// `((k² − k − 1)²/(k − 1)) Δ(A) Δ(B)`.
    pub rhs: f64,
    /// Distance between the scaled bracket and the defect matrix of the
    /// normalized Choi map.
    pub formula_residual: f64,
    pub holds: bool,
    pub formula_ok: bool,
}

/// `(k²−k−1)tr(AB)I − kAB − (k−1)tr(A)tr(B)I + tr(B)A + tr(A)B`.
pub fn corollary_bracket(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let k = a.rows();
    let kf = k as f64;
    let ab = a.matmul(b)?;
    let (tr_a, tr_b, tr_ab) = (a.trace()?, b.trace()?, ab.trace()?);
    let scalar = tr_ab * (kf * kf - kf - 1.0) - tr_a * tr_b * (kf - 1.0);
    let mut out = &(&a.scale(tr_b) + &b.scale(tr_a)) - &ab.scale_real(kf);
    for i in 0..k {
        out[(i, i)] += scalar;
    }
    Ok(out)
}

pub fn check_corollary(k: usize, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<CorollaryReport> {
    if k < 4 {
        bail!(Contract, "the corollary needs k >= 4, got {k}");
    }
    let map = normalized_choi_map(k)?;
    check_operands(&map, &[a, b])?;
    let kf = k as f64;
    let c = kf * kf - kf - 1.0;
    let bracket = corollary_bracket(a, b)?;
    let lhs = operator_norm(&bracket);
    let da = delta(a, DeltaMethod::Auto, DELTA_SEED)?.value;
    let db = delta(b, DeltaMethod::Auto, DELTA_SEED)?.value;
    let rhs = c * c / (kf - 1.0) * da * db;
    let predicted = bracket.scale_real((kf - 1.0) / (c * c));
    let formula_residual = operator_norm(&(&predicted - &defect_matrix(&map, a, b)?));
    Ok(CorollaryReport {
        k,
        lhs,
        rhs,
        formula_residual,
        holds: lhs <= rhs + VIOL_REL_TOL * (1.0 + rhs),
        formula_ok: formula_residual <= 1e-10 * (1.0 + lhs),
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct ProofChainReport {
    pub m: usize,
    /// `M = (m²+2)/(m²−2m) ‖A‖`.
    pub big_m: f64,
    pub defect: f64,
    /// `‖Φ(U_j B) − Φ(U_j)Φ(B)‖` for each unitary.
    pub unitary_defects: Vec<f64>,
    /// `(M/m) Σ_j ‖Φ(U_j B) − Φ(U_j)Φ(B)‖`.
    pub triangle_bound: f64,
    /// `(M/m) Σ_j ‖U_j‖ ‖B‖`.
    pub final_bound: f64,
    /// `((m²+2)/(m²−2m)) ‖A‖ ‖B‖`.
    pub formula_bound: f64,
    /// `‖A‖ ‖B‖`.
    pub norm_bound: f64,
    pub unitarity_residual: f64,
    pub reconstruction_residual: f64,
    pub links_hold: bool,
    pub norm_bound_holds: bool,
}

/// Follows the unitary-averaging argument for `A` against a normal `B`.
pub fn proof_chain(map: &MapRep, a: &ComplexMatrix, b: &ComplexMatrix, m: usize) -> Result<ProofChainReport> {
    check_operands(map, &[a, b])?;
    require_unital(map)?;
    if cp_test(map)?.status != PositivityStatus::CertifiedCp {
        bail!(Contract, "proof chain is run for CP maps only");
    }
    let nb = operator_norm(b);
    if b.normality_residual() > 1e-9 * nb * nb {
        bail!(Contract, "B must be normal");
    }
    let (scaled, big_m) = rescale_for_decomposition(a, m)?;
    let dec = decompose_unitary_sum(&scaled, m, Mode::Strict)?;
    let na = operator_norm(a);
    let mf = m as f64;

    let defect = gruss_defect(map, a, b)?;
    let unitary_defects = dec.unitaries.iter().map(|u| gruss_defect(map, u, b)).collect::<Result<Vec<_>>>()?;
    let triangle_bound = big_m / mf * unitary_defects.iter().sum::<f64>();
    let final_bound = big_m / mf * dec.unitaries.iter().map(|u| operator_norm(u) * nb).sum::<f64>();
    let formula_bound = (mf * mf + 2.0) / (mf * mf - 2.0 * mf) * na * nb;
    let norm_bound = na * nb;

    let tol = |x: f64| 1e-9 * (1.0 + x);
    let per_unitary = unitary_defects.iter().all(|&d| d <= nb + tol(nb));
    let links_hold = defect <= triangle_bound + tol(triangle_bound)
        && per_unitary
        && triangle_bound <= final_bound + tol(final_bound)
        && (final_bound - formula_bound).abs() <= tol(formula_bound);
    Ok(ProofChainReport {
        m,
        big_m,
        defect,
        unitary_defects,
        triangle_bound,
        final_bound,
        formula_bound,
        norm_bound,
        unitarity_residual: dec.unitarity_residual(),
        reconstruction_residual: operator_norm(&(&dec.mean().scale_real(big_m) - a)),
        links_hold,
        norm_bound_holds: defect <= norm_bound + 1e-8,
    })
}

/// `|defect(A − λI, B − μI) − defect(A, B)|` for a unital map.
pub fn translation_gap(
    map: &MapRep,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    lambda: C64,
    mu: C64,
) -> Result<f64> {
    let base = gruss_defect(map, a, b)?;
    Ok((gruss_defect(map, &a.shift(lambda)?, &b.shift(mu)?)? - base).abs())
}
