//! Distance of an operator from the scalar multiples of the identity,
//! `Δ(C) = inf_λ ‖C − λI‖`, in operator norm.
//!
//! Three independent routes:
//!
//! - normal `C`: the radius of the smallest disk containing the spectrum;
//! - any `C`: convex minimization of `λ ↦ ‖C − λI‖` over the plane;
//! - a brute-force grid, kept as an oracle for the other two.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{bail, Result};
use crate::linalg::{normal_eig, operator_norm};
use crate::matrix::{c64, ComplexMatrix, C64};
use crate::random;

/// Relative tolerance on `‖CC* − C*C‖ / ‖C‖²` for the normal route.
pub const NORMALITY_TOL: f64 = 1e-9;
/// Points closer than this (relative to the point cloud's scale) are merged.
pub const DEDUP_TOL: f64 = 1e-12;
pub const COARSE_GRID: usize = 21;
/// Default oracle resolution.
pub const ORACLE_RESOLUTION: usize = 201;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct SpectralDisk {
    pub center: C64,
    pub radius: f64,
    /// Up to three input points on the boundary that pin the disk.
    pub support_points: Vec<C64>,
}

impl SpectralDisk {
    fn point(p: C64) -> Self {
        Self { center: p, radius: 0.0, support_points: alloc::vec![p] }
    }

    fn diameter(p: C64, q: C64) -> Self {
        Self { center: (p + q) * 0.5, radius: (p - q).norm() * 0.5, support_points: alloc::vec![p, q] }
    }

    fn circumscribed(p: C64, q: C64, r: C64) -> Self {
        let a = q - p;
        let b = r - p;
        let d = 2.0 * (a.re * b.im - a.im * b.re);
        let scale = a.norm_sqr().max(b.norm_sqr());
        if d.abs() <= 1e-14 * scale {
            // Collinear: the widest pair spans the other point.
            let candidates = [Self::diameter(p, q), Self::diameter(p, r), Self::diameter(q, r)];
            return candidates.into_iter().max_by(|x, y| x.radius.total_cmp(&y.radius)).unwrap();
        }
        let (aa, bb) = (a.norm_sqr(), b.norm_sqr());
        let offset = c64((b.im * aa - a.im * bb) / d, (a.re * bb - b.re * aa) / d);
        Self { center: p + offset, radius: offset.norm(), support_points: alloc::vec![p, q, r] }
    }

    pub fn contains(&self, p: C64, tol: f64) -> bool {
        (p - self.center).norm() <= self.radius + tol
    }
}

/// Minimal enclosing disk of a point set (Welzl's randomized incremental
/// construction, iterative form).
pub fn smallest_enclosing_disk(points: &[C64], seed: u64) -> Result<SpectralDisk> {
    if points.is_empty() {
        bail!(Contract, "smallest enclosing disk of an empty point set");
    }
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let merge = DEDUP_TOL * (1.0 + scale);
    let mut pts: Vec<C64> = Vec::with_capacity(points.len());
    for &p in points {
        if !pts.iter().any(|q| (p - *q).norm() <= merge) {
            pts.push(p);
        }
    }
    pts.shuffle(&mut random::rng(seed));

    let tol = 1e-12 * (1.0 + scale);
    let mut disk = SpectralDisk::point(pts[0]);
    for i in 1..pts.len() {
        if disk.contains(pts[i], tol) {
            continue;
        }
        disk = SpectralDisk::point(pts[i]);
        for j in 0..i {
            if disk.contains(pts[j], tol) {
                continue;
            }
            disk = SpectralDisk::diameter(pts[i], pts[j]);
            for k in 0..j {
                if !disk.contains(pts[k], tol) {
                    disk = SpectralDisk::circumscribed(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Ok(disk)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DeltaRoute {
    Disk,
    Convex,
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DeltaMethod {
    /// Disk when the normality check passes, convex otherwise.
    Auto,
    Disk,
    Convex,
    Grid,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct DeltaResult {
    pub value: f64,
    pub minimizer: C64,
    pub method: DeltaRoute,
    /// Upper bound on `value − Δ(C)` under the 1-Lipschitz argument.
    pub certified_gap: f64,
}

fn require_square(c: &ComplexMatrix) -> Result<()> {
    if !c.is_square() {
        bail!(Dimension, "distance to scalars needs a square matrix, got {}x{}", c.rows(), c.cols());
    }
    Ok(())
}

fn distance_at(c: &ComplexMatrix, lambda: C64) -> f64 {
    operator_norm(&c.shift(lambda).expect("square"))
}

/// Whether `C` passes the normality precondition of [`delta_normal`].
pub fn is_normal(c: &ComplexMatrix) -> bool {
    if !c.is_square() {
        return false;
    }
    let n = operator_norm(c);
    c.normality_residual() <= NORMALITY_TOL * n * n
}

/// `Δ(C)` for normal `C` as the Chebyshev radius of its spectrum.
pub fn delta_normal(c: &ComplexMatrix, seed: u64) -> Result<DeltaResult> {
    require_square(c)?;
    if !is_normal(c) {
        bail!(
            Contract,
            "matrix is not normal (‖CC* − C*C‖ = {:e}); use the convex method",
            c.normality_residual()
        );
    }
    let (spectrum, _) = normal_eig(c)?;
    let disk = smallest_enclosing_disk(&spectrum, seed)?;
    let achieved = distance_at(c, disk.center);
    Ok(DeltaResult {
        value: disk.radius,
        minimizer: disk.center,
        method: DeltaRoute::Disk,
        certified_gap: (achieved - disk.radius).abs(),
    })
}

/// Brent's derivative-free minimizer on `[a, b]` for a unimodal `f`.
fn brent_min(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = tol;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else if d > 0.0 { x + tol1 } else { x - tol1 };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// `Δ(C)` for any square `C` by convex minimization of `λ ↦ ‖C − λI‖`.
///
/// The minimizer lies in the numerical range, so in `|λ| ≤ ‖C‖`. Stages:
/// a 21×21 grid over that square; nested Brent searches (partial
/// minimization of a jointly convex function stays convex, so each 1-D
/// search is unimodal); then a compass/diagonal pattern search from the
/// better point, halving the step until it drops below `1e-9·(1+‖C‖)`.
pub fn delta_general(c: &ComplexMatrix) -> Result<DeltaResult> {
    require_square(c)?;
    let radius = operator_norm(c);
    if radius == 0.0 {
        return Ok(DeltaResult {
            value: 0.0,
            minimizer: C64::default(),
            method: DeltaRoute::Convex,
            certified_gap: 0.0,
        });
    }
    let f = |l: C64| distance_at(c, l);

    let spacing = 2.0 * radius / (COARSE_GRID - 1) as f64;
    let mut best = (C64::default(), f64::INFINITY);
    for i in 0..COARSE_GRID {
        for j in 0..COARSE_GRID {
            let l = c64(-radius + i as f64 * spacing, -radius + j as f64 * spacing);
            let v = f(l);
            if v < best.1 {
                best = (l, v);
            }
        }
    }

    let tol = 1e-10 * (1.0 + radius);
    let inner = |x: f64| brent_min(|y| f(c64(x, y)), -radius, radius, tol);
    let (x, _) = brent_min(|x| inner(x).1, -radius, radius, tol);
    let (y, fy) = inner(x);
    if fy < best.1 {
        best = (c64(x, y), fy);
    }

    let floor = 1e-9 * (1.0 + radius);
    let dirs = [
        c64(1.0, 0.0),
        c64(-1.0, 0.0),
        c64(0.0, 1.0),
        c64(0.0, -1.0),
        c64(core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2),
        c64(-core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2),
        c64(core::f64::consts::FRAC_1_SQRT_2, -core::f64::consts::FRAC_1_SQRT_2),
        c64(-core::f64::consts::FRAC_1_SQRT_2, -core::f64::consts::FRAC_1_SQRT_2),
    ];
    let mut step = spacing;
    while step >= floor {
        let mut improved = false;
        for d in dirs {
            let cand = best.0 + d * step;
            let v = f(cand);
            if v < best.1 {
                best = (cand, v);
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Ok(DeltaResult { value: best.1, minimizer: best.0, method: DeltaRoute::Convex, certified_gap: step })
}

/// Exhaustive minimum over a `resolution × resolution` grid on the square
/// of half-width `half_width` centred at `tr(C)/dim`.
///
/// The centre is a mean of eigenvalues, hence within `Δ(C)` of the true
/// minimizer; `half_width ≥ ‖C‖` therefore always brackets it.
pub fn delta_grid_oracle(c: &ComplexMatrix, half_width: f64, resolution: usize) -> Result<DeltaResult> {
    require_square(c)?;
    if resolution < 2 {
        bail!(Contract, "grid resolution must be at least 2, got {resolution}");
    }
    if !(half_width >= 0.0) {
        bail!(Contract, "grid half-width must be non-negative, got {half_width}");
    }
    let center = c.trace()? / c.rows() as f64;
    let spacing = 2.0 * half_width / (resolution - 1) as f64;
    let mut best = (center, f64::INFINITY);
    for i in 0..resolution {
        for j in 0..resolution {
            let l = center + c64(-half_width + i as f64 * spacing, -half_width + j as f64 * spacing);
            let v = distance_at(c, l);
            if v < best.1 {
                best = (l, v);
            }
        }
    }
    Ok(DeltaResult { value: best.1, minimizer: best.0, method: DeltaRoute::Grid, certified_gap: spacing })
}

/// Dispatches to one of the routes; `Grid` uses half-width `‖C‖ + 1`
/// at [`ORACLE_RESOLUTION`].
pub fn delta(c: &ComplexMatrix, method: DeltaMethod, seed: u64) -> Result<DeltaResult> {
    match method {
        DeltaMethod::Auto => {
            require_square(c)?;
            if is_normal(c) {
                delta_normal(c, seed)
            } else {
                delta_general(c)
            }
        }
        DeltaMethod::Disk => delta_normal(c, seed),
        DeltaMethod::Convex => delta_general(c),
        DeltaMethod::Grid => delta_grid_oracle(c, operator_norm(c) + 1.0, ORACLE_RESOLUTION),
    }
}
