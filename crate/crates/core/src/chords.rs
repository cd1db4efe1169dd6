//! The billiard generating function `L(x, y)`: geodesic chord length
//! between the boundary points at arc-length parameters `x` and `y`.
//!
//! First partials: `L_x = -cos φ`, `L_y = cos ψ`. Second partials, with
//! `s = sin_like`, `t = tan_like` of the geometry (`L` / `sin L` / `sinh L`
//! and `L` / `tan L` / `tanh L`):
//!
//! ```text
//! L_xy = sin φ sin ψ / s(L)
//! L_xx = sin² φ / t(L) - κ(x) sin φ
//! L_yy = sin² ψ / t(L) - κ(y) sin ψ
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{geodesic_curvature, Curve};
use crate::precise::{self, dd, Dd, DdVec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordData {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "L")]
    pub length: f64,
    pub phi: f64,
    pub psi: f64,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    #[serde(rename = "Lxx")]
    pub lxx: f64,
    #[serde(rename = "Lyy")]
    pub lyy: f64,
    #[serde(rename = "Lxy")]
    pub lxy: f64,
}

/// Chord length between arc-length parameters `x` and `y`.
pub fn chord_length<C: Curve + ?Sized>(curve: &C, x: f64, y: f64) -> f64 {
    let g = curve.geometry();
    let p = curve.position(curve.param_at_arc_length(x));
    let q = curve.position(curve.param_at_arc_length(y));
    g.raw_distance(&p, &q)
}

/// Chord geometry and the analytic partials of `L` at `(x, y)`.
///
/// The end angles are measured geometrically; the derivative formulas are
/// only used for the partials.
pub fn chord_data<C: Curve + ?Sized>(curve: &C, x: f64, y: f64) -> Result<ChordData> {
    let g = curve.geometry();
    let total = curve.length();
    let gap = (y - x).rem_euclid(total);
    if gap < 1e-12 * total || total - gap < 1e-12 * total {
        return Err(Error::CoincidentPoints);
    }
    let tx = curve.param_at_arc_length(x);
    let ty = curve.param_at_arc_length(y);
    let p = curve.position(tx);
    let q = curve.position(ty);
    let vp = curve.velocity(tx);
    let vq = curve.velocity(ty);

    let length = g.raw_distance(&p, &q);
    if length <= 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let leaving = g.direction_towards(&p, &q);
    let arriving = -g.direction_towards(&q, &p);
    // The chord must enter on the convex (left) side at p and leave it at q.
    if g.inner(&leaving, &g.left_normal(&p, &vp)) <= 0.0 || g.inner(&arriving, &g.left_normal(&q, &vq)) >= 0.0 {
        return Err(Error::NotConvex);
    }
    let phi = g.raw_angle(&leaving, &vp);
    let psi = g.raw_angle(&arriving, &vq);

    let kx = geodesic_curvature(curve, tx)?;
    let ky = geodesic_curvature(curve, ty)?;
    let (sp, sq) = (phi.sin(), psi.sin());
    let sl = g.sin_like(length);
    let tl = g.tan_like(length);
    Ok(ChordData {
        x,
        y,
        length,
        phi,
        psi,
        lx: -phi.cos(),
        ly: psi.cos(),
        lxy: sp * sq / sl,
        lxx: sp * sp / tl - kx * sp,
        lyy: sq * sq / tl - ky * sq,
    })
}

/// Central differences of the chord-length function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifferencePartials {
    pub lx: f64,
    pub ly: f64,
    pub lxx: f64,
    pub lyy: f64,
    pub lxy: f64,
}

pub const FD_STEP: f64 = 1e-5;
pub const RELATIVE_FLOOR: f64 = 1e-3;

/// Central differences of `L` at step `h`. Curves with a double-double
/// evaluation are sampled in that precision; others in f64.
pub fn finite_difference_partials<C: Curve + ?Sized>(curve: &C, x: f64, y: f64, h: f64) -> FiniteDifferencePartials {
    if let Some(fd) = finite_difference_partials_dd(curve, x, y, h) {
        return fd;
    }
    let l = |a: f64, b: f64| chord_length(curve, a, b);
    let l00 = l(x, y);
    let (lpx, lmx) = (l(x + h, y), l(x - h, y));
    let (lpy, lmy) = (l(x, y + h), l(x, y - h));
    let lpp = l(x + h, y + h);
    let lpm = l(x + h, y - h);
    let lmp = l(x - h, y + h);
    let lmm = l(x - h, y - h);
    FiniteDifferencePartials {
        lx: (lpx - lmx) / (2.0 * h),
        ly: (lpy - lmy) / (2.0 * h),
        lxx: (lpx - 2.0 * l00 + lmx) / (h * h),
        lyy: (lpy - 2.0 * l00 + lmy) / (h * h),
        lxy: (lpp - lpm - lmp + lmm) / (4.0 * h * h),
    }
}

fn finite_difference_partials_dd<C: Curve + ?Sized>(
    curve: &C,
    x: f64,
    y: f64,
    h: f64,
) -> Option<FiniteDifferencePartials> {
    let g = curve.geometry();
    let (xd, yd, hd) = (dd(x), dd(y), dd(h));
    let at = |s: Dd| curve.position_at_arc_length_dd(s);
    let (xm, x0, xp) = (at(xd - hd)?, at(xd)?, at(xd + hd)?);
    let (ym, y0, yp) = (at(yd - hd)?, at(yd)?, at(yd + hd)?);
    let l = |p: &DdVec3, q: &DdVec3| precise::distance(g, p, q);
    let l00 = l(&x0, &y0);
    let (lpx, lmx) = (l(&xp, &y0), l(&xm, &y0));
    let (lpy, lmy) = (l(&x0, &yp), l(&x0, &ym));
    let (lpp, lpm) = (l(&xp, &yp), l(&xp, &ym));
    let (lmp, lmm) = (l(&xm, &yp), l(&xm, &ym));
    let h2 = hd * hd;
    Some(FiniteDifferencePartials {
        lx: ((lpx - lmx) / (hd * 2.0)).hi(),
        ly: ((lpy - lmy) / (hd * 2.0)).hi(),
        lxx: ((lpx - l00 * 2.0 + lmx) / h2).hi(),
        lyy: ((lpy - l00 * 2.0 + lmy) / h2).hi(),
        lxy: ((lpp - lpm - lmp + lmm) / (h2 * 4.0)).hi(),
    })
}

/// Whether [`finite_difference_partials`] samples `curve` in
/// double-double precision.
pub fn uses_double_double<C: Curve + ?Sized>(curve: &C) -> bool {
    curve.position_at_arc_length_dd(dd(0.0)).is_some()
}

fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(RELATIVE_FLOOR)
}

/// Worst relative error of each analytic partial against central
/// differences of the distance function.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PartialsReport {
    pub samples: usize,
    pub step: f64,
    /// `"double-double"` or `"f64"`: the precision of the sampled values.
    pub precision: &'static str,
    pub max_rel_err_lx: f64,
    pub max_rel_err_ly: f64,
    pub max_rel_err_lxx: f64,
    pub max_rel_err_lyy: f64,
    pub max_rel_err_lxy: f64,
    pub max_rel_err: f64,
}

/// Compares analytic partials with central differences at `samples`
/// random chords. The pair `(x, y)` is drawn with `y - x` between 10% and
/// 90% of the perimeter so no chord is near-degenerate.
pub fn validate_partials<C: Curve + ?Sized>(curve: &C, samples: usize, seed: u64) -> Result<PartialsReport> {
    validate_partials_with_step(curve, samples, seed, FD_STEP)
}

pub fn validate_partials_with_step<C: Curve + ?Sized>(
    curve: &C,
    samples: usize,
    seed: u64,
    step: f64,
) -> Result<PartialsReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = curve.length();
    let mut report = PartialsReport {
        samples,
        step,
        precision: if uses_double_double(curve) {
            "double-double"
        } else {
            "f64"
        },
        ..Default::default()
    };
    for _ in 0..samples {
        let x = rng.random_range(0.0..total);
        let y = x + total * rng.random_range(0.1..0.9);
        let a = chord_data(curve, x, y)?;
        let fd = finite_difference_partials(curve, x, y, step);
        report.max_rel_err_lx = report.max_rel_err_lx.max(relative_error(a.lx, fd.lx));
        report.max_rel_err_ly = report.max_rel_err_ly.max(relative_error(a.ly, fd.ly));
        report.max_rel_err_lxx = report.max_rel_err_lxx.max(relative_error(a.lxx, fd.lxx));
        report.max_rel_err_lyy = report.max_rel_err_lyy.max(relative_error(a.lyy, fd.lyy));
        report.max_rel_err_lxy = report.max_rel_err_lxy.max(relative_error(a.lxy, fd.lxy));
    }
    report.max_rel_err = [
        report.max_rel_err_lx,
        report.max_rel_err_ly,
        report.max_rel_err_lxx,
        report.max_rel_err_lyy,
        report.max_rel_err_lxy,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(report)
}
