//! Acceptance criteria 1–11. Prints one PASS/FAIL line per criterion (also
//! under plain `cargo test`) and fails if any criterion fails.

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gruss_core::distance::{delta, delta_general, delta_grid_oracle, delta_normal, DeltaMethod, ORACLE_RESOLUTION};
use gruss_core::harness::{proof_chain, two_positive_config};
use gruss_core::linalg::{hermitian_eig, operator_norm};
use gruss_core::matrix::{apply, dot, vec_norm};
use gruss_core::posmap::{choi_map, cp_test, n_positivity_search, random_unital_cp, transpose, PositivityStatus};
use gruss_core::random::{self, random_ensemble, Ensemble};
use gruss_core::stinespring::{dilate, homomorphism_check};
use gruss_core::unitary_sum::{decompose_unitary_sum, Mode};
use gruss_core::{ComplexMatrix, C64};
use gruss_lab::cli;
use rayon::prelude::*;
use serde_json::Value;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs the CLI in-process and returns `(exit code, report, elapsed)`.
fn lab(args: &[&str]) -> Result<(i32, Value, Duration), String> {
    let start = Instant::now();
    let out = cli::run(std::iter::once("gruss-lab").chain(args.iter().copied()));
    let elapsed = start.elapsed();
    if out.code == 1 {
        return Err(format!("`{}` failed: {}", args.join(" "), out.stderr.trim()));
    }
    let report = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    Ok((out.code, report, elapsed))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn suite_clean(r: &Value) -> Result<(), String> {
    let s = &r["result"];
    ensure(s["violations"] == 0, || format!("{} violations, worst margin {}", s["violations"], s["worstMargin"]))?;
    ensure(s["sideFailures"] == 0, || format!("{} side-check failures, worst {}", s["sideFailures"], s["sideWorst"]))
}

fn c1_counterexample() -> Verdict {
    let (code, r, t) = lab(&["counterexample"])?;
    let res = &r["result"];
    for (key, want) in [("defect", 6.0), ("deltaA", 2.5), ("deltaB", 1.5), ("bound", 3.75)] {
        let got = num(&res[key]);
        ensure((got - want).abs() <= 1e-9, || format!("{key} = {got}, expected {want}"))?;
    }
    ensure(res["inequalityFails"] == true, || "inequalityFails is false".into())?;
    ensure(code == 0, || format!("exit code {code}"))?;
    ensure(t < Duration::from_millis(100), || format!("took {t:?}"))?;
    Ok(format!("defect 6, Δ(A) 2.5, Δ(B) 1.5, bound 3.75 in {t:?}"))
}

fn c2_theorem() -> Verdict {
    std::env::set_var("GRUSS_LAB_THREADS", "0");
    let run = lab(&["verify", "theorem", "--family", "cp", "--dims", "2,3,4", "--trials", "1000"]);
    std::env::remove_var("GRUSS_LAB_THREADS");
    let (_, r, t) = run?;
    suite_clean(&r)?;
    ensure(t < Duration::from_secs(60), || format!("sequential run took {t:?}"))?;
    Ok(format!("1000 trials, 0 violations, worst ratio {:.4}, sequential {t:?}", num(&r["result"]["worstRatio"])))
}

fn c3_corollary() -> Verdict {
    let (_, r, t) = lab(&["verify", "corollary", "--dims", "4,5", "--trials", "500"])?;
    suite_clean(&r)?;
    let worst = num(&r["result"]["sideWorst"]);
    ensure(worst <= 1e-10, || format!("formula residual {worst:e} relative to 1 + lhs"))?;
    Ok(format!("500 trials, 0 violations, max formula residual/(1+lhs) {worst:.1e} in {t:?}"))
}

/// Minimum of `⟨x, J x⟩` over the whole unit sphere by sampling and a
/// shrinking random hill climb; no eigensolver involved.
fn sphere_min(j: &ComplexMatrix, samples: usize, seed: u64) -> f64 {
    let n = j.rows();
    let mut rng = random::rng(seed);
    let q = |x: &[C64]| dot(x, &apply(j, x)).re;
    let (mut best, mut best_q) = (random::unit_vector(n, &mut rng), f64::INFINITY);
    for _ in 0..samples {
        let x = random::unit_vector(n, &mut rng);
        let v = q(&x);
        if v < best_q {
            (best, best_q) = (x, v);
        }
    }
    let mut step = 0.5;
    while step > 1e-9 {
        let mut improved = false;
        for _ in 0..200 {
            let dir = random::gaussian_vector(n, &mut rng);
            let mut x: Vec<C64> = best.iter().zip(&dir).map(|(a, d)| a + d * step).collect();
            let nx = vec_norm(&x);
            x.iter_mut().for_each(|z| *z /= nx);
            let v = q(&x);
            if v < best_q {
                (best, best_q, improved) = (x, v, true);
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best_q
}

fn c4_choi_map() -> Verdict {
    let mut detail = Vec::new();
    for k in [3, 4] {
        let map = choi_map(k).map_err(|e| e.to_string())?;
        let full = n_positivity_search(&map, k, 200, 200, 0).map_err(|e| e.to_string())?;
        ensure(full.status == PositivityStatus::CertifiedNotNPositive && full.min_value_found <= -0.9, || {
            format!("k={k}, n=k: {:?} with {}", full.status, full.min_value_found)
        })?;
        let below = n_positivity_search(&map, k - 1, 200, 200, 0).map_err(|e| e.to_string())?;
        ensure(below.status == PositivityStatus::HeuristicallyNPositive && below.min_value_found >= -1e-7, || {
            format!("k={k}, n=k-1: {:?} with {}", below.status, below.min_value_found)
        })?;
        detail.push(format!("k={k}: n=k {:.6}, n=k-1 {:.1e}", full.min_value_found, below.min_value_found));
    }
    let oracle = sphere_min(&choi_map(3).unwrap().choi_matrix(), 20_000, 3);
    ensure((oracle + 1.0).abs() <= 1e-6, || format!("sphere oracle at k=3 gives {oracle}"))?;
    detail.push(format!("sphere oracle k=3 {oracle:.8}"));
    Ok(detail.join("; "))
}

fn c5_transpose() -> Verdict {
    let map = transpose(2).unwrap();
    let cp = cp_test(&map).map_err(|e| e.to_string())?;
    ensure((cp.min_value_found + 1.0).abs() <= 1e-9, || format!("min Choi eigenvalue {}", cp.min_value_found))?;
    let r2 = n_positivity_search(&map, 2, 200, 200, 0).map_err(|e| e.to_string())?;
    let w = r2.witness.as_ref().ok_or("no rank-2 witness")?;
    let replay = w.rayleigh(&map.choi_matrix());
    ensure((replay + 1.0).abs() <= 1e-6 && w.terms() <= 2, || format!("rank-2 witness value {replay}"))?;
    let r1 = n_positivity_search(&map, 1, 200, 200, 0).map_err(|e| e.to_string())?;
    ensure(r1.min_value_found >= -1e-9, || format!("rank-1 search reached {}", r1.min_value_found))?;
    Ok(format!("min eigenvalue {:.12}, rank-2 witness {replay:.9}, rank-1 min {:.1e}", cp.min_value_found, r1.min_value_found))
}

fn c6_lemma1() -> Verdict {
    let (_, r, t) = lab(&["verify", "lemma1", "--dims", "2,3", "--trials", "200"])?;
    suite_clean(&r)?;
    Ok(format!("100 per dim, 0 violations, min block eigenvalue {:.1e} in {t:?}", -num(&r["result"]["sideWorst"])))
}

fn c7_lemma2() -> Verdict {
    let mut detail = Vec::new();
    for family in ["positive", "cp"] {
        let (_, r, t) = lab(&["verify", "lemma2", "--family", family, "--dims", "2,3", "--trials", "1000"])?;
        suite_clean(&r)?;
        detail.push(format!("{family}: 500 per dim, worst ratio {:.4} in {t:?}", num(&r["result"]["worstRatio"])));
    }
    Ok(detail.join("; "))
}

fn c8_stinespring() -> Verdict {
    let mut worst = [0.0f64; 3];
    for k in [2, 3] {
        for i in 0..100u64 {
            let rank = 1 + (i as usize) % (k * k);
            let map = random_unital_cp(k, rank, 1000 * k as u64 + i).map_err(|e| e.to_string())?;
            let d = dilate(&map).map_err(|e| e.to_string())?;
            let h = homomorphism_check(&d, 10, i);
            let hom = h.multiplicativity.max(h.adjoint).max(h.unit).max(h.norm);
            let iso = d.isometry_residual();
            ensure(iso <= 1e-10 && h.dilation <= 1e-9 && hom <= 1e-10, || {
                format!("k={k} map {i}: isometry {iso:e}, dilation {:e}, homomorphism {hom:e}", h.dilation)
            })?;
            worst = [worst[0].max(iso), worst[1].max(h.dilation), worst[2].max(hom)];
        }
    }
    Ok(format!(
        "200 maps: isometry {:.1e}, dilation/(1+‖A‖) {:.1e}, homomorphism {:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn c9_unitary_sums() -> Verdict {
    let mut worst = 0.0f64;
    for k in [2, 3] {
        for m in [3usize, 4, 7, 10] {
            for i in 0..100u64 {
                let g = random_ensemble(Ensemble::Ginibre, k, 10_000 * m as u64 + 100 * k as u64 + i);
                let a = g.scale_real(0.9 * (1.0 - 2.0 / m as f64) / operator_norm(&g));
                let d = decompose_unitary_sum(&a, m, Mode::Strict).map_err(|e| e.to_string())?;
                let (u, r) = (d.unitarity_residual(), d.reconstruction_error);
                ensure(u <= 1e-10 && r <= 1e-10, || format!("k={k} m={m} #{i}: unitarity {u:e}, reconstruction {r:e}"))?;
                worst = worst.max(u).max(r);
            }
        }
    }
    let mut gap = 0.0f64;
    for m in [3usize, 5, 10, 50] {
        for i in 0..20u64 {
            let k = 2 + (i as usize) % 2;
            let seed = 7_000 * m as u64 + i;
            let map = random_unital_cp(k, 1 + (i as usize) % (k * k), seed).map_err(|e| e.to_string())?;
            let a = random_ensemble(Ensemble::Ginibre, k, seed + 1).scale_real(3.0);
            let b = random_ensemble(Ensemble::Normal, k, seed + 2);
            let p = proof_chain(&map, &a, &b, m).map_err(|e| e.to_string())?;
            let g = (p.final_bound - p.formula_bound).abs();
            ensure(p.links_hold && p.norm_bound_holds && g <= 1e-9, || {
                format!("m={m} #{i}: links {}, norm bound {}, final-formula gap {g:e}", p.links_hold, p.norm_bound_holds)
            })?;
            gap = gap.max(g);
        }
    }
    Ok(format!("800 decompositions, max residual {worst:.1e}; 80 proof chains, max final-formula gap {gap:.1e}"))
}

fn c10_delta() -> Verdict {
    let cases: Vec<(usize, u64)> = [2usize, 3, 4].iter().flat_map(|&k| (0..100).map(move |i| (k, i))).collect();
    let worst = cases
        .par_iter()
        .map(|&(k, i)| -> Result<[f64; 3], String> {
            let seed = 50_000 + 1000 * k as u64 + i;
            let c = random_ensemble(Ensemble::Ginibre, k, seed);
            let g = delta_grid_oracle(&c, operator_norm(&c) + 1.0, ORACLE_RESOLUTION).map_err(|e| e.to_string())?;
            let d = delta_general(&c).map_err(|e| e.to_string())?;
            let grid_gap = (d.value - g.value).abs();
            ensure(grid_gap <= g.certified_gap + 1e-9, || {
                format!("k={k} #{i}: general {} vs grid {} (spacing {})", d.value, g.value, g.certified_gap)
            })?;

            let n = random_ensemble(Ensemble::Normal, k, seed + 1);
            let normal_gap =
                (delta_normal(&n, 0).map_err(|e| e.to_string())?.value - delta_general(&n).map_err(|e| e.to_string())?.value)
                    .abs();
            ensure(normal_gap <= 1e-6, || format!("k={k} #{i}: normal routes differ by {normal_gap:e}"))?;

            let h = random_ensemble(Ensemble::Hermitian, k, seed + 2);
            let eig = hermitian_eig(&h).map_err(|e| e.to_string())?;
            let spread = (eig.eigenvalues[k - 1] - eig.eigenvalues[0]) / 2.0;
            let herm_gap = (delta(&h, DeltaMethod::Auto, 0).map_err(|e| e.to_string())?.value - spread).abs();
            ensure(herm_gap <= 1e-9, || format!("k={k} #{i}: Hermitian closed form off by {herm_gap:e}"))?;
            Ok([grid_gap - g.certified_gap, normal_gap, herm_gap])
        })
        .try_reduce(|| [f64::NEG_INFINITY, 0.0, 0.0], |a, b| Ok([a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])]))?;
    Ok(format!(
        "300 per check: max (|general − grid| − spacing) {:.1e}, normal routes {:.1e}, Hermitian {:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn c11_explorer() -> Verdict {
    let (code, r, t) = lab(&["explore", "two-positive", "--trials", "10000", "--seed", "1"])?;
    let s = &r["result"];
    ensure(code == 0, || format!("exit code {code}"))?;
    ensure(s["trials"] == 10000, || format!("ran {} trials", s["trials"]))?;
    ensure(s["worstRatio"].is_number() && s["worstInstance"].is_object(), || "missing worst ratio or instance".into())?;
    ensure(t < Duration::from_secs(120), || format!("took {t:?}"))?;
    let expected = two_positive_config(10_000, 1);
    ensure(s["dims"] == serde_json::json!(expected.dims), || "unexpected dims".into())?;
    Ok(format!("worst ratio {:.6} at trial {} in {t:?}", num(&s["worstRatio"]), s["worstIndex"]))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("counterexample reproduction", c1_counterexample),
        ("theorem suite", c2_theorem),
        ("corollary suite", c3_corollary),
        ("Choi-map certification", c4_choi_map),
        ("transpose map", c5_transpose),
        ("covariance suite", c6_lemma1),
        ("variance suite", c7_lemma2),
        ("Stinespring dilations", c8_stinespring),
        ("unitary decompositions", c9_unitary_sums),
        ("Δ cross-validation", c10_delta),
        ("explorer", c11_explorer),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let verdict = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let line = match verdict {
            Ok(detail) => format!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("criterion {:>2} FAIL  {name}: {why}", i + 1)
            }
        };
        // Written to the handle directly so the line survives output capture.
        writeln!(std::io::stdout().lock(), "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
