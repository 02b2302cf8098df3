mod common;

use common::draw;
use gruss_core::distance::{delta, delta_general, delta_grid_oracle, delta_normal, smallest_enclosing_disk, DeltaMethod};
use gruss_core::linalg::{hermitian_eig, operator_norm};
use gruss_core::random::{self, Ensemble};
use gruss_core::{c64, ComplexMatrix, C64};
use proptest::prelude::*;

fn auto(c: &ComplexMatrix) -> f64 {
    delta(c, DeltaMethod::Auto, 0).unwrap().value
}

/// Spectra sampled on a circle: the enclosing disk must be that circle.
#[test]
fn disk_of_points_on_a_circle() {
    let center = c64(1.0, -2.0);
    let pts: Vec<C64> = (0..7).map(|i| center + C64::from_polar(3.0, 0.9 * i as f64)).collect();
    let d = smallest_enclosing_disk(&pts, 4).unwrap();
    assert!((d.radius - 3.0).abs() < 1e-9 && (d.center - center).norm() < 1e-9);
}

#[test]
fn disk_radius_matches_brute_force() {
    // Oracle: the minimal disk is determined by 2 or 3 of the points; take
    // the smallest candidate that contains everything.
    for s in 0..50 {
        let mut rng = random::rng(s);
        let pts: Vec<C64> = (0..6).map(|_| random::complex_in_disk(5.0, &mut rng)).collect();
        let contains = |c: C64, r: f64| pts.iter().all(|p| (p - c).norm() <= r + 1e-9);
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let c = (pts[i] + pts[j]) / 2.0;
                let r = (pts[i] - c).norm();
                if contains(c, r) {
                    best = best.min(r);
                }
                for l in j + 1..pts.len() {
                    let (a, b, cc) = (pts[i], pts[j], pts[l]);
                    let d = 2.0 * (a.re * (b.im - cc.im) + b.re * (cc.im - a.im) + cc.re * (a.im - b.im));
                    if d.abs() < 1e-12 {
                        continue;
                    }
                    let (na, nb, nc) = (a.norm_sqr(), b.norm_sqr(), cc.norm_sqr());
                    let ux = (na * (b.im - cc.im) + nb * (cc.im - a.im) + nc * (a.im - b.im)) / d;
                    let uy = (na * (cc.re - b.re) + nb * (a.re - cc.re) + nc * (b.re - a.re)) / d;
                    let center = c64(ux, uy);
                    let r = (a - center).norm();
                    if contains(center, r) {
                        best = best.min(r);
                    }
                }
            }
        }
        let disk = smallest_enclosing_disk(&pts, s).unwrap();
        assert!((disk.radius - best).abs() < 1e-9, "seed {s}: {} vs {best}", disk.radius);
    }
}

#[test]
fn oracle_agreement_sweep() {
    for k in 2..=4 {
        for s in 0..30 {
            let c = draw(Ensemble::Ginibre, k, 500 + s);
            let half = operator_norm(&c) + 1.0;
            let g = delta_grid_oracle(&c, half, 201).unwrap();
            let d = delta_general(&c).unwrap();
            assert!((d.value - g.value).abs() <= g.certified_gap + 1e-9);
            assert!((operator_norm(&c.shift(d.minimizer).unwrap()) - d.value).abs() <= 1e-10);
        }
    }
}

fn dim() -> impl Strategy<Value = usize> {
    2usize..=4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn translation_invariance(k in dim(), s in any::<u64>(), re in -5.0..5.0f64, im in -5.0..5.0f64) {
        let c = draw(Ensemble::Ginibre, k, s);
        let shifted = c.shift(c64(re, im)).unwrap();
        prop_assert!((auto(&shifted) - auto(&c)).abs() <= 1e-8 * (1.0 + operator_norm(&c)));
    }

    #[test]
    fn homogeneity(k in dim(), s in any::<u64>(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let c = draw(Ensemble::Ginibre, k, s);
        let z = c64(re, im);
        let lhs = auto(&c.scale(z));
        prop_assert!((lhs - z.norm() * auto(&c)).abs() <= 1e-8 * (1.0 + z.norm() * operator_norm(&c)));
    }

    #[test]
    fn unitary_invariance(k in dim(), s in any::<u64>()) {
        let c = draw(Ensemble::Ginibre, k, s);
        let u = draw(Ensemble::HaarUnitary, k, s.wrapping_add(9));
        let conj = &(&u * &c) * &u.adjoint();
        prop_assert!((auto(&conj) - auto(&c)).abs() <= 1e-8 * (1.0 + operator_norm(&c)));
    }

    #[test]
    fn bounded_by_norm_and_achieved(k in dim(), s in any::<u64>()) {
        let c = draw(Ensemble::Ginibre, k, s);
        let d = delta(&c, DeltaMethod::Auto, 0).unwrap();
        prop_assert!(d.value <= operator_norm(&c) + 1e-10);
        prop_assert!((operator_norm(&c.shift(d.minimizer).unwrap()) - d.value).abs() <= 1e-10);
    }

    #[test]
    fn hermitian_closed_form(k in dim(), s in any::<u64>()) {
        let c = draw(Ensemble::Hermitian, k, s);
        let e = hermitian_eig(&c).unwrap();
        prop_assert!((auto(&c) - (e.max() - e.min()) / 2.0).abs() <= 1e-9);
        prop_assert!((delta_general(&c).unwrap().value - (e.max() - e.min()) / 2.0).abs() <= 1e-9);
    }

    #[test]
    fn normal_routes_agree(k in dim(), s in any::<u64>()) {
        let c = draw(Ensemble::Normal, k, s);
        let a = delta_normal(&c, s).unwrap().value;
        let b = delta_general(&c).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-6);
    }
}
