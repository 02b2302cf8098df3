//! Seeded randomized trials over map families.
//!
//! Trial `i` draws everything from sub-stream `i` of the master seed, so
//! [`run_trial`] can be called in any order (or concurrently) and
//! [`summarize`] over the outcomes sorted by index reproduces
//! [`run_trials`] exactly.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use super::{check_corollary, check_lemma1, check_lemma2, check_theorem, ratio, VIOL_REL_TOL};
use crate::error::{bail, Error, Result};
use crate::linalg::operator_norm;
use crate::matrix::ComplexMatrix;
use crate::posmap::{normalized_choi_map, random_unital_cp, transpose, MapRep};
use crate::random::{self, Ensemble, LabRng};

/// `defect / bound` above this flags a candidate counterexample in
/// [`explore_two_positive`].
pub const CANDIDATE_RATIO: f64 = 1.0 + 1e-6;

/// Largest operator norm drawn for trial inputs.
const MAX_INPUT_NORM: f64 = 10.0;
const MIN_INPUT_NORM: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    /// Random unital CP maps.
    Cp,
    /// The normalized Choi map, `(k−1)`-positive but not `k`-positive.
    Choi,
    /// Convex combinations of the two above.
    Mixed,
    /// Unitalized `transpose ∘ CP` and `CP ∘ transpose`: positive, not CP.
    Positive,
    /// Normalized Choi map on `M_3` and its mixtures with CP maps.
    TwoPositive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Check {
    Theorem,
    Lemma1,
    Lemma2,
    Corollary,
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $name:literal),* $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $name),* }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$variant),)*
                    _ => Err(Error::Contract(alloc::format!(
                        concat!("unknown ", stringify!($ty), " '{}'"), s
                    ))),
                }
            }
        }
    };
}

keyword_enum!(Family { Cp => "cp", Choi => "choi", Mixed => "mixed", Positive => "positive", TwoPositive => "two_positive" });
keyword_enum!(Check { Theorem => "theorem", Lemma1 => "lemma1", Lemma2 => "lemma2", Corollary => "corollary" });

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct TrialConfig {
    pub family: Family,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub check: Check,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            bail!(Contract, "at least one dimension is required");
        }
        let min_dim = *self.dims.iter().min().expect("non-empty");
        let need = |min: usize, why: &str| -> Result<()> {
            if min_dim < min {
                bail!(Contract, "{why} needs dimensions >= {min}, got {min_dim}");
            }
            Ok(())
        };
        need(2, "every family")?;
        match (self.check, self.family) {
            (Check::Corollary, _) => need(4, "the corollary")?,
            (Check::Theorem | Check::Lemma1, Family::Choi | Family::Mixed) => {
                need(4, "3-positivity of the Choi family")?
            }
            (Check::Theorem | Check::Lemma1 | Check::Lemma2, Family::Cp) => {}
            (Check::Lemma2, Family::Choi | Family::Mixed | Family::Positive) => {}
            (Check::Theorem, Family::TwoPositive) => need(3, "the two-positive family")?,
            (check, family) => bail!(Contract, "family '{family}' is not supported for check '{check}'"),
        }
        Ok(())
    }

    pub fn dim_of(&self, index: usize) -> usize {
        self.dims[index % self.dims.len()]
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct TrialInstance {
    pub map: MapRep,
    pub a: ComplexMatrix,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub b: Option<ComplexMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub index: usize,
    pub dim: usize,
    /// `rhs − lhs` of the main inequality.
    pub margin: f64,
    /// `lhs / rhs` of the main inequality.
    pub ratio: f64,
    pub main_violated: bool,
    /// Secondary assertion tied to the check; see [`TrialSummary::side_check`].
    pub side_value: f64,
    pub side_failed: bool,
    pub instance: TrialInstance,
}

impl TrialOutcome {
    pub fn violated(&self) -> bool {
        self.main_violated || self.side_failed
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct TrialSummary {
    pub check: Check,
    pub family: Family,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub trials: usize,
    /// Trials failing the main inequality or the side check.
    pub violations: usize,
    /// Smallest `rhs − lhs` observed (0 with no trials).
    pub worst_margin: f64,
    /// Largest `lhs / rhs` observed (0 with no trials).
    pub worst_ratio: f64,
    pub worst_index: Option<usize>,
    pub worst_instance: Option<TrialInstance>,
    /// Name of the secondary assertion evaluated on every trial.
    pub side_check: String,
    pub side_failures: usize,
    /// Largest value of the side-check statistic.
    pub side_worst: f64,
    /// Set when the worst ratio exceeds [`CANDIDATE_RATIO`].
    pub candidate: bool,
    /// Filled in by callers that have a clock.
    pub wall_time_ms: u64,
}

fn side_check_name(check: Check) -> &'static str {
    match check {
        Check::Theorem => "defect <= |A||B| + 1e-8; statistic: defect - |A||B|",
        Check::Lemma1 => "covariance block min eigenvalue >= -1e-8; statistic: -min eigenvalue",
        Check::Lemma2 => "none",
        Check::Corollary => "bracket formula residual <= 1e-10 (1 + lhs); statistic: residual / (1 + lhs)",
    }
}

const ENSEMBLES: [Ensemble; 3] = [Ensemble::Ginibre, Ensemble::Hermitian, Ensemble::Normal];

fn draw_operator(kind: Ensemble, k: usize, rng: &mut LabRng) -> ComplexMatrix {
    let x = random::sample(kind, k, rng);
    let target = random::uniform(MIN_INPUT_NORM, MAX_INPUT_NORM, rng);
    let n = operator_norm(&x);
    if n == 0.0 {
        x
    } else {
        x.scale_real(target / n)
    }
}

fn draw_cp(k: usize, rng: &mut LabRng) -> Result<MapRep> {
    let rank = rng.random_range(1..=k * k);
    random_unital_cp(k, rank, rng.random())
}

fn draw_map(family: Family, k: usize, index: usize, rng: &mut LabRng) -> Result<MapRep> {
    match family {
        Family::Cp => draw_cp(k, rng),
        Family::Choi => normalized_choi_map(k),
        Family::Mixed | Family::TwoPositive => {
            let choi = normalized_choi_map(k)?;
            if family == Family::TwoPositive && index.is_multiple_of(2) {
                return Ok(choi);
            }
            let cp = draw_cp(k, rng)?;
            let w = rng.random::<f64>();
            MapRep::convex_mix(&[(w, &choi), (1.0 - w, &cp)])
        }
        Family::Positive => {
            let cp = draw_cp(k, rng)?;
            let t = transpose(k)?;
            let composed = if index.is_multiple_of(2) { MapRep::compose(&t, &cp)? } else { MapRep::compose(&cp, &t)? };
            composed.unitalize()
        }
    }
}

/// Runs trial `index` of `config`. Only sub-stream `index` of the seed is
/// consumed.
pub fn run_trial(config: &TrialConfig, index: usize) -> Result<TrialOutcome> {
    let k = config.dim_of(index);
    let mut rng = random::sub_rng(config.seed, index as u64);
    let kind_a = ENSEMBLES[index % 3];
    let kind_b = ENSEMBLES[(index / 3) % 3];

    let out = |margin, ratio, main_violated, side_value, side_failed, instance| TrialOutcome {
        index,
        dim: k,
        margin,
        ratio,
        main_violated,
        side_value,
        side_failed,
        instance,
    };

    match config.check {
        Check::Theorem => {
            let map = draw_map(config.family, k, index, &mut rng)?;
            let a = draw_operator(kind_a, k, &mut rng);
            let b = draw_operator(kind_b, k, &mut rng);
            let r = check_theorem(&map, &a, &b, None)?;
            let excess = r.defect - operator_norm(&a) * operator_norm(&b);
            Ok(out(r.margin, r.ratio(), r.violated, excess, excess > 1e-8, TrialInstance { map, a, b: Some(b) }))
        }
        Check::Lemma1 => {
            let map = draw_map(config.family, k, index, &mut rng)?;
            let a = draw_operator(kind_a, k, &mut rng);
            let b = draw_operator(kind_b, k, &mut rng);
            let r = check_lemma1(&map, &a, &b)?;
            let tol = VIOL_REL_TOL * (1.0 + r.rhs_product);
            let main = r.lhs_squared > r.rhs_product + tol;
            Ok(out(
                r.rhs_product - r.lhs_squared,
                ratio(r.lhs_squared, r.rhs_product, tol),
                main,
                -r.block_min_eig,
                r.block_min_eig < -VIOL_REL_TOL,
                TrialInstance { map, a, b: Some(b) },
            ))
        }
        Check::Lemma2 => {
            let map = draw_map(config.family, k, index, &mut rng)?;
            let arbitrary = config.family == Family::Cp;
            let a = draw_operator(if arbitrary { kind_a } else { Ensemble::Normal }, k, &mut rng);
            let r = check_lemma2(&map, &a, !arbitrary)?;
            let tol = VIOL_REL_TOL * (1.0 + r.rhs);
            Ok(out(r.rhs - r.lhs, ratio(r.lhs, r.rhs, tol), !r.holds, 0.0, false, TrialInstance { map, a, b: None }))
        }
        Check::Corollary => {
            let a = draw_operator(kind_a, k, &mut rng);
            let b = draw_operator(kind_b, k, &mut rng);
            let r = check_corollary(k, &a, &b)?;
            let tol = VIOL_REL_TOL * (1.0 + r.rhs);
            Ok(out(
                r.rhs - r.lhs,
                ratio(r.lhs, r.rhs, tol),
                !r.holds,
                r.formula_residual / (1.0 + r.lhs),
                !r.formula_ok,
                TrialInstance { map: normalized_choi_map(k)?, a, b: Some(b) },
            ))
        }
    }
}

/// Aggregates outcomes, which must be sorted by trial index. The worst
/// instance is the smallest margin, ties going to the lowest index.
pub fn summarize(config: &TrialConfig, outcomes: &[TrialOutcome]) -> TrialSummary {
    let mut summary = TrialSummary {
        check: config.check,
        family: config.family,
        dims: config.dims.clone(),
        seed: config.seed,
        trials: outcomes.len(),
        violations: 0,
        worst_margin: 0.0,
        worst_ratio: 0.0,
        worst_index: None,
        worst_instance: None,
        side_check: side_check_name(config.check).into(),
        side_failures: 0,
        side_worst: 0.0,
        candidate: false,
        wall_time_ms: 0,
    };
    let mut worst: Option<&TrialOutcome> = None;
    for (i, o) in outcomes.iter().enumerate() {
        debug_assert!(i == 0 || outcomes[i - 1].index < o.index, "outcomes must be sorted by index");
        summary.violations += o.violated() as usize;
        summary.side_failures += o.side_failed as usize;
        summary.side_worst = if i == 0 { o.side_value } else { summary.side_worst.max(o.side_value) };
        summary.worst_ratio = summary.worst_ratio.max(o.ratio);
        if worst.is_none_or(|w| o.margin < w.margin) {
            worst = Some(o);
        }
    }
    if let Some(w) = worst {
        summary.worst_margin = w.margin;
        summary.worst_index = Some(w.index);
        summary.worst_instance = Some(w.instance.clone());
    }
    summary.candidate = summary.worst_ratio > CANDIDATE_RATIO;
    summary
}

pub fn run_trials(config: &TrialConfig) -> Result<TrialSummary> {
    config.validate()?;
    let outcomes = (0..config.trials).map(|i| run_trial(config, i)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(config, &outcomes))
}

/// Configuration used by [`explore_two_positive`].
pub fn two_positive_config(trials: usize, seed: u64) -> TrialConfig {
    TrialConfig { family: Family::TwoPositive, dims: vec![3], trials, seed, check: Check::Theorem }
}

/// Exploratory run on 2-positive maps of `M_3` (even trials: the
/// normalized Choi map; odd trials: its mixtures with CP maps). Violations
/// are recorded, never raised; `candidate` flags a ratio above
/// [`CANDIDATE_RATIO`].
pub fn explore_two_positive(trials: usize, seed: u64) -> Result<TrialSummary> {
    run_trials(&two_positive_config(trials, seed))
}
