//! Writing a contraction as an average of unitaries.
//!
//! On a matrix algebra this is explicit: with `A = W P` (polar) and
//! `P = Q diag(s_t) Q*`, each eigenvalue `s_t` is split into `m` unimodular
//! numbers with mean `s_t`, and `U_j = W Q diag_t(z_j^{(t)}) Q*`.

use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::linalg::{hermitian_eig, operator_norm, polar_decompose};
use crate::math;
use crate::matrix::{ComplexMatrix, C64};

/// Slack allowed on the scalar range checks before clamping.
const RANGE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    /// `m ≥ 3`, `‖A‖ < 1 − 2/m`.
    #[default]
    Strict,
    /// `m ≥ 2`, `‖A‖ ≤ 1`.
    Relaxed,
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct UnitarySumDecomposition {
    pub m: usize,
    pub unitaries: Vec<ComplexMatrix>,
    /// `‖(1/m) Σ U_j − A‖`.
    pub reconstruction_error: f64,
}

impl UnitarySumDecomposition {
    /// `(1/m) Σ U_j`.
    pub fn mean(&self) -> ComplexMatrix {
        let k = self.unitaries[0].rows();
        let sum = self.unitaries.iter().fold(ComplexMatrix::zeros(k, k), |acc, u| &acc + u);
        sum.scale_real(1.0 / self.m as f64)
    }

    /// `max_j ‖U_j* U_j − I‖`.
    pub fn unitarity_residual(&self) -> f64 {
        self.unitaries
            .iter()
            .map(|u| {
                let id = ComplexMatrix::identity(u.rows());
                operator_norm(&(&(&u.adjoint() * u) - &id))
            })
            .fold(0.0, f64::max)
    }
}

fn threshold(m: usize, mode: Mode) -> f64 {
    match mode {
        Mode::Strict => 1.0 - 2.0 / m as f64,
        Mode::Relaxed => 1.0,
    }
}

/// `m` unit-modulus numbers with sum `m·s`.
///
/// Even `m`: `m/2` pairs `e^{±iθ}` with `cos θ = s`. Odd `m`: a leading `1`
/// followed by `(m−1)/2` pairs with `cos θ = (ms − 1)/(m − 1)`.
pub fn scalar_unimodular_sum(s: f64, m: usize, mode: Mode) -> Result<Vec<C64>> {
    if m < 2 {
        bail!(Contract, "need m >= 2, got {m}");
    }
    let hi = threshold(m, mode);
    if !(s >= -RANGE_SLACK && s <= hi + RANGE_SLACK) {
        bail!(Contract, "s = {s} outside [0, {hi}] for m = {m}");
    }
    let s = s.clamp(0.0, hi);
    let mut out = Vec::with_capacity(m);
    let cos = if m.is_multiple_of(2) {
        s
    } else {
        out.push(C64::new(1.0, 0.0));
        (m as f64 * s - 1.0) / (m as f64 - 1.0)
    };
    let theta = math::acos(cos);
    let z = C64::new(math::cos(theta), math::sin(theta));
    for _ in 0..m / 2 {
        out.push(z);
        out.push(z.conj());
    }
    Ok(out)
}

pub fn decompose_unitary_sum(a: &ComplexMatrix, m: usize, mode: Mode) -> Result<UnitarySumDecomposition> {
    if !a.is_square() {
        bail!(Dimension, "unitary decomposition needs a square matrix, got {}x{}", a.rows(), a.cols());
    }
    let norm = operator_norm(a);
    match mode {
        Mode::Strict => {
            if m < 3 {
                bail!(Contract, "strict mode needs m >= 3, got {m}");
            }
            let t = threshold(m, mode);
            if !(norm < t) {
                bail!(Contract, "‖A‖ = {norm} is not below 1 - 2/m = {t}");
            }
        }
        Mode::Relaxed => {
            if m < 2 {
                bail!(Contract, "relaxed mode needs m >= 2, got {m}");
            }
            if !(norm <= 1.0 + RANGE_SLACK) {
                bail!(Contract, "‖A‖ = {norm} exceeds 1");
            }
        }
    }

    let k = a.rows();
    let (w, p) = polar_decompose(a)?;
    let eig = hermitian_eig(&p)?;
    let q = &eig.eigenvectors;
    let wq = &w * q;
    let q_star = q.adjoint();
    let hi = threshold(m, mode);

    let phases = eig
        .eigenvalues
        .iter()
        .map(|&s| scalar_unimodular_sum(s.clamp(0.0, hi), m, mode))
        .collect::<Result<Vec<_>>>()?;
    let unitaries: Vec<ComplexMatrix> = (0..m)
        .map(|j| {
            let d: Vec<C64> = (0..k).map(|t| phases[t][j]).collect();
            &(&wq * &ComplexMatrix::diag(&d)) * &q_star
        })
        .collect();

    let mut out = UnitarySumDecomposition { m, unitaries, reconstruction_error: 0.0 };
    out.reconstruction_error = operator_norm(&(&out.mean() - a));
    Ok(out)
}

/// `M = (m² + 2)/(m² − 2m) · ‖A‖`; returns `(A/M, M)`.
pub fn rescale_for_decomposition(a: &ComplexMatrix, m: usize) -> Result<(ComplexMatrix, f64)> {
    if m < 3 {
        bail!(Contract, "rescaling needs m >= 3, got {m}");
    }
    let norm = operator_norm(a);
    if norm == 0.0 {
        bail!(Contract, "cannot rescale the zero operator");
    }
    let mf = m as f64;
    let big_m = (mf * mf + 2.0) / (mf * mf - 2.0 * mf) * norm;
    Ok((a.scale_real(1.0 / big_m), big_m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::random::{random_ensemble, Ensemble};
    use core::f64::consts::PI;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn scalar_examples() {
        let z = scalar_unimodular_sum(0.0, 3, Mode::Strict).unwrap();
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!(close(z[0], c64(1.0, 0.0)) && close(z[1], w) && close(z[2], w.conj()));

        let z = scalar_unimodular_sum(0.5, 4, Mode::Strict).unwrap();
        let w = C64::from_polar(1.0, PI / 3.0);
        assert!(close(z[0], w) && close(z[1], w.conj()) && close(z[2], w) && close(z[3], w.conj()));

        let z = scalar_unimodular_sum(1.0, 2, Mode::Relaxed).unwrap();
        assert!(close(z[0], c64(1.0, 0.0)) && close(z[1], c64(1.0, 0.0)));
    }

    #[test]
    fn scalar_range_errors() {
        assert!(scalar_unimodular_sum(0.5, 3, Mode::Strict).is_err());
        assert!(scalar_unimodular_sum(-0.1, 5, Mode::Relaxed).is_err());
        assert!(scalar_unimodular_sum(1.1, 5, Mode::Relaxed).is_err());
        assert!(scalar_unimodular_sum(0.0, 1, Mode::Relaxed).is_err());
    }

    #[test]
    fn scalar_sums() {
        for m in 2..12 {
            for i in 0..=20 {
                let s = (1.0 - 2.0 / m as f64) * i as f64 / 20.0;
                let z = scalar_unimodular_sum(s, m, Mode::Strict).unwrap();
                assert_eq!(z.len(), m);
                assert!(z.iter().all(|v| (v.norm() - 1.0).abs() <= 1e-14));
                let sum: C64 = z.iter().sum();
                assert!((sum - c64(m as f64 * s, 0.0)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn zero_and_scalar_matrices() {
        let d = decompose_unitary_sum(&ComplexMatrix::zeros(3, 3), 3, Mode::Strict).unwrap();
        assert_eq!(d.unitaries.len(), 3);
        assert!(d.reconstruction_error < 1e-14 && d.unitarity_residual() < 1e-12);

        let a = ComplexMatrix::identity(2).scale_real(0.5);
        let d = decompose_unitary_sum(&a, 5, Mode::Strict).unwrap();
        assert!(d.reconstruction_error <= 1e-12 && d.unitarity_residual() <= 1e-12);
    }

    #[test]
    fn random_contractions() {
        for (seed, m) in [(1u64, 3usize), (2, 4), (3, 7), (4, 10)] {
            let g = random_ensemble(Ensemble::Ginibre, 3, seed);
            let a = g.scale_real(0.9 * (1.0 - 2.0 / m as f64) / operator_norm(&g));
            let d = decompose_unitary_sum(&a, m, Mode::Strict).unwrap();
            assert!(d.unitarity_residual() <= 1e-10);
            assert!(d.reconstruction_error <= 1e-10 * (1.0 + operator_norm(&a)));
        }
        let g = random_ensemble(Ensemble::Ginibre, 3, 9);
        let a = g.scale_real(1.0 / operator_norm(&g));
        let d = decompose_unitary_sum(&a, 2, Mode::Relaxed).unwrap();
        assert!(d.unitarity_residual() <= 1e-10 && d.reconstruction_error <= 1e-10);
    }

    #[test]
    fn hypothesis_errors() {
        let a = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(decompose_unitary_sum(&a, 4, Mode::Strict).is_err());
        assert!(decompose_unitary_sum(&a, 2, Mode::Strict).is_err());
        assert!(decompose_unitary_sum(&a.scale_real(3.0), 5, Mode::Relaxed).is_err());
    }

    #[test]
    fn rescale_examples() {
        let a = ComplexMatrix::diag_real(&[1.0, 0.2]);
        let (s, m) = rescale_for_decomposition(&a, 3).unwrap();
        assert!((m - 11.0 / 3.0).abs() < 1e-14);
        assert!((operator_norm(&s) - 3.0 / 11.0).abs() < 1e-14);

        let (_, m) = rescale_for_decomposition(&a.scale_real(2.0), 4).unwrap();
        assert!((m - 4.5).abs() < 1e-14);

        let (_, m200) = rescale_for_decomposition(&a, 200).unwrap();
        assert!((m200 - 40002.0 / 39600.0).abs() < 1e-14);
        let (_, m2000) = rescale_for_decomposition(&a, 2000).unwrap();
        assert!(1.0 < m2000 && m2000 < m200 && m2000 <= 1.0011);
        assert!(rescale_for_decomposition(&ComplexMatrix::zeros(2, 2), 3).is_err());
    }

    #[test]
    fn rescaled_reconstruction() {
        for (seed, m) in [(5u64, 3usize), (6, 5), (7, 10)] {
            let a = random_ensemble(Ensemble::Ginibre, 3, seed).scale_real(4.0);
            let (s, big_m) = rescale_for_decomposition(&a, m).unwrap();
            let d = decompose_unitary_sum(&s, m, Mode::Strict).unwrap();
            let back = d.mean().scale_real(big_m);
            assert!(operator_norm(&(&back - &a)) <= 1e-9 * (1.0 + operator_norm(&a)));
        }
    }
}
