mod common;

use common::{dist, draw};
use gruss_core::distance::{delta, DeltaMethod};
use gruss_core::linalg::operator_norm;
use gruss_core::posmap::random_unital_cp;
use gruss_core::random::{self, Ensemble};
use gruss_core::stinespring::{dilate, homomorphism_check, lemma2_defect_identity};
use gruss_core::unitary_sum::{decompose_unitary_sum, rescale_for_decomposition, scalar_unimodular_sum, Mode};
use gruss_core::{c64, ComplexMatrix, C64};
use proptest::prelude::*;

#[test]
fn defect_identity_tuples() {
    for k in [2, 3] {
        for s in 0..100u64 {
            let mut rng = random::rng(s);
            let map = random_unital_cp(k, 1 + (s as usize % (k * k)), s).unwrap();
            let dil = dilate(&map).unwrap();
            let a = random::ginibre(k, k, &mut rng);
            let (l, m) = (random::complex_in_disk(3.0, &mut rng), random::complex_in_disk(3.0, &mut rng));
            let r = lemma2_defect_identity(&dil, &a, l, m).unwrap();
            let na = operator_norm(&a);
            assert!((r.lhs - r.rhs).abs() <= 1e-9 * (1.0 + na * na));
            assert!(r.lhs <= r.shifted_bound + 1e-9);
        }
    }
}

#[test]
fn identity_pair_has_no_residual() {
    let dil = dilate(&random_unital_cp(3, 3, 8).unwrap()).unwrap();
    let id = ComplexMatrix::identity(3);
    let pi = dil.pi(&id);
    assert_eq!(dist(&dil.pi(&(&id * &id)), &(&pi * &pi)), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dilations_are_isometric(k in 2usize..=3, rank in 1usize..=9, s in any::<u64>()) {
        let map = random_unital_cp(k, rank, s).unwrap();
        let dil = dilate(&map).unwrap();
        prop_assert!(dil.env_dim <= k * k);
        prop_assert!(dil.isometry_residual() <= 1e-10);
        let p = dil.complement_projection();
        prop_assert!(dist(&(&p * &p), &p) <= 1e-10);
        let rep = homomorphism_check(&dil, 10, s);
        prop_assert!(rep.multiplicativity <= 1e-10 && rep.adjoint <= 1e-12 && rep.unit == 0.0);
        prop_assert!(rep.norm <= 1e-10 && rep.dilation <= 1e-9);
    }

    #[test]
    fn variance_bound_for_normal_operators(s in any::<u64>()) {
        let dil = dilate(&random_unital_cp(3, 3, s).unwrap()).unwrap();
        let a = draw(Ensemble::Normal, 3, s);
        let d = delta(&a, DeltaMethod::Disk, 0).unwrap();
        let r = lemma2_defect_identity(&dil, &a, d.minimizer, d.minimizer).unwrap();
        prop_assert!(r.lhs <= d.value * d.value + 1e-8);
    }

    #[test]
    fn scalar_sums(m in 2usize..40, t in 0.0..=1.0f64) {
        let s = t * (1.0 - 2.0 / m as f64);
        let z = scalar_unimodular_sum(s, m, Mode::Strict).unwrap();
        prop_assert!(z.iter().all(|v| (v.norm() - 1.0).abs() <= 1e-14));
        let sum: C64 = z.iter().sum();
        prop_assert!((sum - c64(m as f64 * s, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn decompositions(k in 1usize..=4, m in 3usize..=12, s in any::<u64>()) {
        let g = draw(Ensemble::Ginibre, k, s);
        let a = g.scale_real(0.9 * (1.0 - 2.0 / m as f64) / operator_norm(&g));
        let d = decompose_unitary_sum(&a, m, Mode::Strict).unwrap();
        prop_assert_eq!(d.unitaries.len(), m);
        prop_assert!(d.unitarity_residual() <= 1e-10);
        prop_assert!(d.reconstruction_error <= 1e-10 * (1.0 + operator_norm(&a)));
    }

    #[test]
    fn rescaled_decompositions(k in 2usize..=4, mi in 0usize..3, s in any::<u64>(), scale in 0.01..50.0f64) {
        let m = [3, 5, 10][mi];
        let a = draw(Ensemble::Ginibre, k, s).scale_real(scale);
        let (scaled, big_m) = rescale_for_decomposition(&a, m).unwrap();
        let d = decompose_unitary_sum(&scaled, m, Mode::Strict).unwrap();
        let back = d.mean().scale_real(big_m);
        prop_assert!(dist(&back, &a) <= 1e-9 * (1.0 + operator_norm(&a)));
    }
}
