//! Root solvers for the admissibility equations.
//!
//! The tangent equations are solved in cross-multiplied sine/cosine form,
//! which has no poles:
//!
//! - `k tan c = tan kc` becomes `(k-1) sin((k+1)c) = (k+1) sin((k-1)c)`;
//! - `tan(krπ/n) tan(π/n) = tan(kπ/n) tan(rπ/n)` becomes
//!   `sin A cos B cos C sin E = cos A sin B sin C cos E` with
//!   `A = krπ/n`, `B = kπ/n`, `C = rπ/n`, `E = π/n`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{check_radius, Geometry};

/// One solution of `k tan c = tan kc`, together with its contact angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleSolution {
    pub k: u32,
    pub geometry: Geometry,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub c: f64,
    pub alpha: f64,
    pub residual: f64,
}

/// `(k-1) sin((k+1)c) - (k+1) sin((k-1)c)`, which vanishes exactly where
/// `sin kc cos c = k sin c cos kc`.
pub fn gutkin_pole_free(k: u32, c: f64) -> f64 {
    let k = f64::from(k);
    (k - 1.0) * ((k + 1.0) * c).sin() - (k + 1.0) * ((k - 1.0) * c).sin()
}

/// `k tan c - tan kc`; infinite at poles.
pub fn gutkin_tangent_residual(k: u32, c: f64) -> f64 {
    let kf = f64::from(k);
    kf * c.tan() - (kf * c).tan()
}

const ROOT_GRID: usize = 1_000_000;
const POLE_INSET: f64 = 1e-9;
// The pole-free form has a triple zero at 0 and π (the trivial set
// tan c = 0) and rounds to exactly zero nearby.
const TRIVIAL_BAND: f64 = 1e-4;

/// All roots of `k tan c = tan kc` in `(0, π)`, ascending.
///
/// The pole-free form also vanishes at `c = π/2` for odd `k`, where both
/// tangents are infinite; such points are discarded.
pub fn gutkin_roots(k: u32) -> Vec<f64> {
    if k < 2 {
        return Vec::new();
    }
    let lo = POLE_INSET;
    let hi = PI - POLE_INSET;
    let step = (hi - lo) / ROOT_GRID as f64;
    let f = |c: f64| gutkin_pole_free(k, c);

    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=ROOT_GRID {
        let b = lo + i as f64 * step;
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            roots.push(bisect(f, a, b, fa));
        }
        a = b;
        fa = fb;
    }

    roots.retain(|&c| is_genuine_gutkin_root(k, c));
    roots.dedup_by(|x, y| (*x - *y).abs() < 1e-10);
    roots
}

fn is_genuine_gutkin_root(k: u32, c: f64) -> bool {
    if !(TRIVIAL_BAND..=PI - TRIVIAL_BAND).contains(&c) {
        return false;
    }
    // Both tangents at a pole: the cross-multiplied identity holds
    // vacuously. A genuine root needs the tangent form to be finite.
    if c.cos().abs() < 1e-6 || (f64::from(k) * c).cos().abs() < 1e-6 {
        return false;
    }
    let scale = f64::from(k) * c.tan().abs() + 1.0;
    gutkin_tangent_residual(k, c).abs() < 1e-9 * scale
}

/// Bisection to the last representable bit.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

/// Contact angle `α` for a chord correspondence shift `c`:
/// `α = c` (E²), `cot c = cos R cot α` (S²), `cot c = cosh R cot α` (H²).
///
/// The branch keeps `α ∈ (0, π)` and the sign of `cos α` equal to that of
/// `cos c`.
pub fn contact_angle_from_c(geometry: Geometry, radius: f64, c: f64) -> Result<f64> {
    if geometry != Geometry::Euclidean {
        check_radius(geometry, radius)?;
    }
    if !(c > 0.0 && c < PI) {
        return Err(Error::OutOfRange(format!("c = {c} is outside (0, π)")));
    }
    Ok(match geometry {
        Geometry::Euclidean => c,
        Geometry::Spherical => (c.sin() * radius.cos()).atan2(c.cos()),
        Geometry::Hyperbolic => (c.sin() * radius.cosh()).atan2(c.cos()),
    })
}

/// Inverse of [`contact_angle_from_c`].
pub fn c_from_contact_angle(geometry: Geometry, radius: f64, alpha: f64) -> Result<f64> {
    if geometry != Geometry::Euclidean {
        check_radius(geometry, radius)?;
    }
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Error::OutOfRange(format!("alpha = {alpha} is outside (0, π)")));
    }
    Ok(match geometry {
        Geometry::Euclidean => alpha,
        Geometry::Spherical => alpha.sin().atan2(radius.cos() * alpha.cos()),
        Geometry::Hyperbolic => alpha.sin().atan2(radius.cosh() * alpha.cos()),
    })
}

/// Chord shift `c` and the parameter normalization constant `a` of a
/// circle of radius `R` viewed as a curve with contact angle `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleConstants {
    pub c: f64,
    pub a: f64,
    /// Discrepancy between the two equivalent forms of the `c`-relation.
    pub form_defect: f64,
}

pub fn lemma_canda_constants(geometry: Geometry, radius: f64, alpha: f64) -> Result<CircleConstants> {
    let c = c_from_contact_angle(geometry, radius, alpha)?;
    let (a, cos_alpha_from_c) = match geometry {
        Geometry::Euclidean => (1.0, c.cos()),
        Geometry::Spherical => {
            let (sr, cr) = radius.sin_cos();
            let a = (cr * cr + alpha.sin().powi(2) * sr * sr).sqrt();
            let cc = c.cos();
            (a, cc / (sr * sr * cc * cc + cr * cr).sqrt())
        }
        Geometry::Hyperbolic => {
            let (sr, cr) = (radius.sinh(), radius.cosh());
            let a = (cr * cr - alpha.sin().powi(2) * sr * sr).sqrt();
            let cc = c.cos();
            (a, cc / (cr * cr - sr * sr * cc * cc).sqrt())
        }
    };
    let form_defect = (cos_alpha_from_c - alpha.cos()).abs();
    if form_defect > 1e-12 {
        return Err(Error::NotApplicable(format!(
            "equivalent forms disagree by {form_defect:e}"
        )));
    }
    Ok(CircleConstants { c, a, form_defect })
}

/// Solutions of `k tan c = tan kc`, mapped to contact angles for circles
/// of radius `R` when a curved geometry is requested.
pub fn solve_angle(k: u32, geometry: Geometry, radius: Option<f64>) -> Result<Vec<AngleSolution>> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("k = {k} must be at least 2")));
    }
    let r = match (geometry, radius) {
        (Geometry::Euclidean, _) => None,
        (_, Some(r)) => {
            check_radius(geometry, r)?;
            Some(r)
        }
        (_, None) => return Err(Error::InvalidSpec("a radius is required for curved geometries".into())),
    };
    gutkin_roots(k)
        .into_iter()
        .map(|c| {
            let alpha = contact_angle_from_c(geometry, r.unwrap_or(0.0), c)?;
            Ok(AngleSolution {
                k,
                geometry,
                radius: r,
                c,
                alpha,
                residual: gutkin_pole_free(k, c).abs(),
            })
        })
        .collect()
}

/// An integer solution `r` of the discrete tangent equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiophantineSolution {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub lhs_minus_rhs: f64,
}

/// Cross-multiplied, pole-free residual of the discrete tangent equation.
pub fn restr2_pole_free(n: usize, k: usize, r: usize) -> f64 {
    let n = n as f64;
    let (k, r) = (k as f64, r as f64);
    let a = k * r * PI / n;
    let b = k * PI / n;
    let c = r * PI / n;
    let e = PI / n;
    a.sin() * b.cos() * c.cos() * e.sin() - a.cos() * b.sin() * c.sin() * e.cos()
}

const RESTR2_TOL: f64 = 1e-9;

/// All `r ∈ [2, n-2]` satisfying the discrete tangent equation.
///
/// For `r` in this range `sin((r ± 1)π/n) ≠ 0`, and the pole-free form is
/// then equivalent to the vanishing of the circulant eigenvalue `λ_r`. No
/// tangent-form filtering is applied: at `n = 2k` every odd `r` puts both
/// tangent products at a pole while still being a genuine solution.
pub fn solve_restr2(n: usize, k: usize) -> Result<Vec<DiophantineSolution>> {
    if k < 2 || 2 * k > n {
        return Err(Error::OutOfRange(format!("need 2 ≤ k ≤ n/2, got n = {n}, k = {k}")));
    }
    Ok((2..=n - 2)
        .filter_map(|r| {
            let g = restr2_pole_free(n, k, r);
            (g.abs() < RESTR2_TOL).then_some(DiophantineSolution {
                n,
                k,
                r,
                lhs_minus_rhs: g,
            })
        })
        .collect())
}

/// The arithmetic characterization of the sub-`n/2` solutions:
/// `k + r = n/2` and `n | (k-1)(r-1)`.
pub fn connelly_check(n: usize, k: usize, r: usize) -> Result<bool> {
    if !(1 < k && 2 * k < n && 1 < r && 2 * r < n) {
        return Err(Error::OutOfRange(format!(
            "need 1 < k, r < n/2, got n = {n}, k = {k}, r = {r}"
        )));
    }
    Ok(2 * (k + r) == n && ((k - 1) * (r - 1)).is_multiple_of(n))
}
