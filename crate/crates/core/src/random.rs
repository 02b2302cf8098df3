//! Seeded random matrix ensembles.
//!
//! All randomness flows from ChaCha8 seeded with a `u64`. Independent
//! sub-streams (one per trial, one per search start) are selected with
//! `set_stream`, so a sub-seed depends only on `(seed, index)` and never
//! on execution order.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::math;
use crate::matrix::{c64, dot, vec_norm, ComplexMatrix, C64};

pub type LabRng = ChaCha8Rng;

pub fn rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for sub-stream `index` of `seed`.
pub fn sub_rng(seed: u64, index: u64) -> LabRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Ensemble {
    /// i.i.d. standard complex Gaussian entries.
    Ginibre,
    HaarUnitary,
    Hermitian,
    /// `Q diag(z) Q*` with Haar `Q` and Gaussian `z`.
    Normal,
}

/// Standard complex Gaussian with `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// Uniformly distributed unit vector in `C^n`.
pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let mut v = gaussian_vector(n, rng);
    let nrm = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= nrm);
    v
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: Gram–Schmidt on a Ginibre sample. Modified
/// Gram–Schmidt leaves the triangular factor with a positive real
/// diagonal, which is the phase fix that makes the result Haar.
pub fn haar_unitary<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(k, k, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let proj = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let nrm = vec_norm(&v);
        v.iter_mut().for_each(|z| *z /= nrm);
        cols.push(v);
    }
    ComplexMatrix::from_columns(&cols)
}

/// GUE-like Hermitian sample; `H == H*` holds exactly.
pub fn hermitian<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        let d: f64 = rng.sample(StandardNormal);
        h[(i, i)] = c64(d, 0.0);
        for j in i + 1..k {
            let z = complex_gaussian(rng);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

pub fn normal<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ComplexMatrix {
    let q = haar_unitary(k, rng);
    let d = ComplexMatrix::diag(&gaussian_vector(k, rng));
    &(&q * &d) * &q.adjoint()
}

pub fn sample<R: Rng + ?Sized>(kind: Ensemble, k: usize, rng: &mut R) -> ComplexMatrix {
    match kind {
        Ensemble::Ginibre => ginibre(k, k, rng),
        Ensemble::HaarUnitary => haar_unitary(k, rng),
        Ensemble::Hermitian => hermitian(k, rng),
        Ensemble::Normal => normal(k, rng),
    }
}

/// One `k × k` draw from `kind`, fully determined by `seed`.
pub fn random_ensemble(kind: Ensemble, k: usize, seed: u64) -> ComplexMatrix {
    assert!(k >= 1, "dimension must be positive");
    sample(kind, k, &mut rng(seed))
}

/// Random positive semidefinite `G G*` with `G` Ginibre of the given rank.
pub fn psd<R: Rng + ?Sized>(k: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(k, rank, rng);
    (&g * &g.adjoint()).hermitian_part()
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random complex number with modulus below `radius`.
pub fn complex_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> C64 {
    let r = radius * math::sqrt(rng.random::<f64>());
    let theta = 2.0 * core::f64::consts::PI * rng.random::<f64>();
    c64(r * math::cos(theta), r * math::sin(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator_norm;

    #[test]
    fn deterministic_for_seed() {
        assert_eq!(
            random_ensemble(Ensemble::HaarUnitary, 3, 11),
            random_ensemble(Ensemble::HaarUnitary, 3, 11)
        );
        assert_ne!(
            random_ensemble(Ensemble::HaarUnitary, 3, 11),
            random_ensemble(Ensemble::HaarUnitary, 3, 12)
        );
        assert_ne!(sub_rng(1, 0).random::<u64>(), sub_rng(1, 1).random::<u64>());
    }

    #[test]
    fn hermitian_exact() {
        let h = random_ensemble(Ensemble::Hermitian, 2, 4);
        assert_eq!(h, h.adjoint());
    }

    #[test]
    fn haar_is_unitary() {
        for seed in 0..20 {
            let u = random_ensemble(Ensemble::HaarUnitary, 5, seed);
            let e = &(&u.adjoint() * &u) - &ComplexMatrix::identity(5);
            assert!(e.max_abs() < 1e-14);
        }
    }

    #[test]
    fn normal_commutes() {
        for seed in 0..20 {
            let n = random_ensemble(Ensemble::Normal, 3, seed);
            let comm = &(&n * &n.adjoint()) - &(&n.adjoint() * &n);
            let nn = operator_norm(&n);
            assert!(operator_norm(&comm) <= 1e-12 * nn * nn);
        }
    }
}
