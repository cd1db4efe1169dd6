//! Double-double helpers for finite-difference oracles.
//!
//! Second differences at step `1e-5` amplify f64 rounding of the sampled
//! values by `1e10`, which leaves only about five correct digits. Curves
//! that can be evaluated in double-double precision let the oracle keep
//! the truncation error as its only error source.
//!
//! Only arithmetic, `sqrt`, `sin` and `cos` of `twofloat` are used (the
//! trig pair is good to about `1e-21`, plenty here). Its hyperbolic and
//! inverse functions can be worse than f64, so those are built here from
//! series and Newton steps.

use twofloat::TwoFloat;

use crate::geometry::Geometry;

pub type Dd = TwoFloat;
pub type DdVec3 = [Dd; 3];

pub fn dd(x: f64) -> Dd {
    TwoFloat::from(x)
}

/// `(sinh u, cosh u)` by argument halving and a Taylor series.
pub fn sinh_cosh(u: Dd) -> (Dd, Dd) {
    let mut halvings = 0;
    let mut x = u;
    while x.hi().abs() > 0.125 {
        x /= 2.0;
        halvings += 1;
    }
    let x2 = x * x;
    let mut term = x;
    let mut sinh = x;
    let mut n = 1.0;
    for _ in 0..20 {
        term = term * x2 / ((n + 1.0) * (n + 2.0));
        sinh += term;
        n += 2.0;
        if term.hi().abs() < 1e-34 * sinh.hi().abs() {
            break;
        }
    }
    let mut cosh = (dd(1.0) + sinh * sinh).sqrt();
    for _ in 0..halvings {
        let s = dd(2.0) * sinh * cosh;
        cosh = cosh * cosh + sinh * sinh;
        sinh = s;
    }
    (sinh, cosh)
}

fn sub(p: &DdVec3, q: &DdVec3) -> DdVec3 {
    [p[0] - q[0], p[1] - q[1], p[2] - q[2]]
}

/// Geodesic distance in double-double precision.
///
/// The f64 inverse function seeds two Newton steps on `sin(L/2) = c/2`
/// (sphere, `c` the ambient chord) or `sinh(L/2) = d/2` (hyperboloid).
pub fn distance(g: Geometry, p: &DdVec3, q: &DdVec3) -> Dd {
    let d = sub(p, q);
    match g {
        Geometry::Euclidean => (d[0] * d[0] + d[1] * d[1]).sqrt(),
        Geometry::Spherical => {
            let half = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() / 2.0;
            let mut u = dd(half.hi().asin());
            for _ in 0..2 {
                let (s, c) = u.sin_cos();
                u -= (s - half) / c;
            }
            u * 2.0
        }
        Geometry::Hyperbolic => {
            let sq = d[1] * d[1] + d[2] * d[2] - d[0] * d[0];
            let half = sq.max(dd(0.0)).sqrt() / 2.0;
            let mut u = dd(half.hi().asinh());
            for _ in 0..2 {
                let (s, c) = sinh_cosh(u);
                u -= (s - half) / c;
            }
            u * 2.0
        }
    }
}
