#![allow(dead_code)]

use gruss_core::linalg::operator_norm;
use gruss_core::random::{self, Ensemble};
use gruss_core::ComplexMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn draw(kind: Ensemble, k: usize, seed: u64) -> ComplexMatrix {
    random::random_ensemble(kind, k, seed)
}

pub fn to_na(a: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

/// Largest singular value from nalgebra.
pub fn na_norm(a: &ComplexMatrix) -> f64 {
    to_na(a).singular_values().max()
}

/// Ascending Hermitian eigenvalues from nalgebra.
pub fn na_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(a).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    operator_norm(&(a - b))
}
