//! Constant-curvature primitives for the Euclidean plane, the unit sphere
//! and the hyperboloid model of the hyperbolic plane.
//!
//! Every point is carried in ambient 3-space. Euclidean points live in the
//! `z = 0` plane. Hyperbolic points live on the upper sheet of
//! `-x0² + x1² + x2² = -1`, with Minkowski signature `(-, +, +)`.
//!
//! Orientation: the "left normal" of a tangent `v` at `p` is `v` rotated by
//! +90° in the tangent plane. Counterclockwise convex curves have their
//! convex side on the left and positive geodesic curvature.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precise::{dd, sinh_cosh, Dd, DdVec3};

pub type Vec3 = Vector3<f64>;

const MANIFOLD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    #[serde(alias = "e2", alias = "E2")]
    Euclidean,
    #[serde(alias = "s2", alias = "S2")]
    Spherical,
    #[serde(alias = "h2", alias = "H2")]
    Hyperbolic,
}

impl Geometry {
    /// Inner product of the ambient model restricted to tangent vectors.
    #[inline]
    pub fn inner(self, u: &Vec3, v: &Vec3) -> f64 {
        match self {
            Geometry::Euclidean => u.x * v.x + u.y * v.y,
            Geometry::Spherical => u.dot(v),
            Geometry::Hyperbolic => -u.x * v.x + u.y * v.y + u.z * v.z,
        }
    }

    #[inline]
    pub fn norm(self, v: &Vec3) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// `v` rotated by +90° in the tangent plane at `p`.
    #[inline]
    pub fn left_normal(self, p: &Vec3, v: &Vec3) -> Vec3 {
        match self {
            Geometry::Euclidean => Vec3::new(-v.y, v.x, 0.0),
            Geometry::Spherical => p.cross(v),
            Geometry::Hyperbolic => {
                let w = p.cross(v);
                Vec3::new(-w.x, w.y, w.z)
            }
        }
    }

    /// Removes the normal component of `v` at `p`.
    pub fn project_tangent(self, p: &Vec3, v: &Vec3) -> Vec3 {
        match self {
            Geometry::Euclidean => Vec3::new(v.x, v.y, 0.0),
            Geometry::Spherical => v - p * p.dot(v),
            // <p, p> = -1, so the tangential part is v + <p, v> p.
            Geometry::Hyperbolic => v + p * self.inner(p, v),
        }
    }

    /// Pulls an ambient vector back onto the model surface.
    pub fn project_point(self, p: &Vec3) -> Vec3 {
        match self {
            Geometry::Euclidean => Vec3::new(p.x, p.y, 0.0),
            Geometry::Spherical => p / p.norm(),
            Geometry::Hyperbolic => {
                let x0 = (1.0 + p.y * p.y + p.z * p.z).sqrt();
                Vec3::new(x0, p.y, p.z)
            }
        }
    }

    /// Deviation of `p` from the model surface.
    pub fn manifold_defect(self, p: &Vec3) -> f64 {
        match self {
            Geometry::Euclidean => p.z.abs(),
            Geometry::Spherical => (p.norm_squared() - 1.0).abs(),
            Geometry::Hyperbolic => {
                let d = (self.inner(p, p) + 1.0).abs();
                if p.x > 0.0 {
                    d
                } else {
                    d.max(1.0)
                }
            }
        }
    }

    /// Geodesic distance between raw ambient points of this geometry.
    pub fn raw_distance(self, p: &Vec3, q: &Vec3) -> f64 {
        match self {
            Geometry::Euclidean => ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt(),
            Geometry::Spherical => p.cross(q).norm().atan2(p.dot(q)),
            Geometry::Hyperbolic => {
                // <p - q, p - q> = 4 sinh²(d / 2) on the hyperboloid.
                let diff = p - q;
                let half = 0.5 * self.inner(&diff, &diff).max(0.0).sqrt();
                2.0 * half.asinh()
            }
        }
    }

    /// Unit tangent at `from` of the geodesic heading to `to`.
    pub fn direction_towards(self, from: &Vec3, to: &Vec3) -> Vec3 {
        let raw = match self {
            Geometry::Euclidean => Vec3::new(to.x - from.x, to.y - from.y, 0.0),
            Geometry::Spherical => to - from * from.dot(to),
            Geometry::Hyperbolic => to + from * self.inner(from, to),
        };
        let n = self.norm(&raw);
        raw / n
    }

    /// Angle in `[0, π]` between two tangent vectors at a common point.
    pub fn raw_angle(self, u: &Vec3, v: &Vec3) -> f64 {
        let uu = self.inner(u, u);
        let vv = self.inner(v, v);
        let uv = self.inner(u, v);
        match self {
            Geometry::Hyperbolic => (uu * vv - uv * uv).max(0.0).sqrt().atan2(uv),
            Geometry::Euclidean => (u.x * v.y - u.y * v.x).abs().atan2(uv),
            Geometry::Spherical => u.cross(v).norm().atan2(uv),
        }
    }

    /// Signed geodesic curvature from ambient position, velocity and
    /// acceleration.
    pub fn curvature_from_derivatives(self, p: &Vec3, v: &Vec3, a: &Vec3) -> f64 {
        let speed = self.norm(v);
        self.inner(a, &self.left_normal(p, v)) / (speed * speed * speed)
    }

    /// The model-specific "sine" of a distance: `L`, `sin L` or `sinh L`.
    pub fn sin_like(self, x: f64) -> f64 {
        match self {
            Geometry::Euclidean => x,
            Geometry::Spherical => x.sin(),
            Geometry::Hyperbolic => x.sinh(),
        }
    }

    /// The model-specific "tangent" of a distance: `L`, `tan L` or `tanh L`.
    pub fn tan_like(self, x: f64) -> f64 {
        match self {
            Geometry::Euclidean => x,
            Geometry::Spherical => x.tan(),
            Geometry::Hyperbolic => x.tanh(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Geometry::Euclidean => "E2",
            Geometry::Spherical => "S2",
            Geometry::Hyperbolic => "H2",
        }
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e2" | "euclidean" => Ok(Geometry::Euclidean),
            "s2" | "spherical" => Ok(Geometry::Spherical),
            "h2" | "hyperbolic" => Ok(Geometry::Hyperbolic),
            other => Err(Error::InvalidSpec(format!("unknown geometry {other:?}"))),
        }
    }
}

/// A point on one of the three model surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    geometry: Geometry,
    coords: Vec3,
}

impl SurfacePoint {
    pub fn new(geometry: Geometry, coords: Vec3) -> Result<Self> {
        let defect = geometry.manifold_defect(&coords);
        if defect > MANIFOLD_TOL * coords.norm_squared().max(1.0) {
            return Err(Error::OffManifold(defect));
        }
        Ok(Self { geometry, coords })
    }

    pub fn euclidean(x: f64, y: f64) -> Self {
        Self {
            geometry: Geometry::Euclidean,
            coords: Vec3::new(x, y, 0.0),
        }
    }

    pub fn spherical(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Geometry::Spherical, Vec3::new(x, y, z))
    }

    pub fn hyperbolic(x0: f64, x1: f64, x2: f64) -> Result<Self> {
        Self::new(Geometry::Hyperbolic, Vec3::new(x0, x1, x2))
    }

    /// Builds a point by projecting `coords` onto the surface.
    pub fn projected(geometry: Geometry, coords: Vec3) -> Self {
        Self {
            geometry,
            coords: geometry.project_point(&coords),
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn coords(&self) -> &Vec3 {
        &self.coords
    }
}

/// A tangent vector attached to a base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    base: SurfacePoint,
    components: Vec3,
}

impl TangentVector {
    pub fn new(base: SurfacePoint, components: Vec3) -> Result<Self> {
        let g = base.geometry;
        let defect = match g {
            Geometry::Euclidean => components.z.abs(),
            _ => g.inner(&base.coords, &components).abs(),
        };
        let scale = components.norm().max(1.0) * base.coords.norm().max(1.0);
        if defect > MANIFOLD_TOL * scale {
            return Err(Error::NotTangent(defect));
        }
        Ok(Self { base, components })
    }

    /// Builds a tangent vector by projecting `components` onto the tangent
    /// plane at `base`.
    pub fn projected(base: SurfacePoint, components: Vec3) -> Self {
        let components = base.geometry.project_tangent(&base.coords, &components);
        Self { base, components }
    }

    pub fn base(&self) -> &SurfacePoint {
        &self.base
    }

    pub fn components(&self) -> &Vec3 {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.base.geometry.norm(&self.components)
    }
}

/// A unit-speed geodesic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    start: SurfacePoint,
    direction: TangentVector,
}

impl Geodesic {
    pub fn new(direction: TangentVector) -> Result<Self> {
        let n = direction.norm();
        if (n - 1.0).abs() > MANIFOLD_TOL {
            return Err(Error::OutOfRange(format!(
                "geodesic direction must have unit norm, got {n}"
            )));
        }
        Ok(Self {
            start: direction.base,
            direction,
        })
    }

    /// Normalizes `direction` to unit speed.
    pub fn through(direction: TangentVector) -> Result<Self> {
        let n = direction.norm();
        if n < 1e-300 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            start: direction.base,
            direction: TangentVector {
                base: direction.base,
                components: direction.components / n,
            },
        })
    }

    pub fn start(&self) -> &SurfacePoint {
        &self.start
    }

    pub fn direction(&self) -> &TangentVector {
        &self.direction
    }
}

/// The point at arc length `s` along `g`.
pub fn geodesic_point(g: &Geodesic, s: f64) -> SurfacePoint {
    let geometry = g.start.geometry;
    let p = &g.start.coords;
    let u = &g.direction.components;
    let q = match geometry {
        Geometry::Euclidean => p + u * s,
        Geometry::Spherical => p * s.cos() + u * s.sin(),
        Geometry::Hyperbolic => p * s.cosh() + u * s.sinh(),
    };
    SurfacePoint::projected(geometry, q)
}

/// Unit velocity of `g` at arc length `s`.
pub fn geodesic_velocity(g: &Geodesic, s: f64) -> TangentVector {
    let geometry = g.start.geometry;
    let p = &g.start.coords;
    let u = &g.direction.components;
    let v = match geometry {
        Geometry::Euclidean => *u,
        Geometry::Spherical => -p * s.sin() + u * s.cos(),
        Geometry::Hyperbolic => p * s.sinh() + u * s.cosh(),
    };
    TangentVector::projected(geodesic_point(g, s), v)
}

pub fn distance(p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
    if p.geometry != q.geometry {
        return Err(Error::MixedGeometry);
    }
    Ok(p.geometry.raw_distance(&p.coords, &q.coords))
}

pub fn angle_between(u: &TangentVector, v: &TangentVector) -> Result<f64> {
    if u.base.geometry != v.base.geometry {
        return Err(Error::MixedGeometry);
    }
    if u.norm() == 0.0 || v.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(u.base.geometry.raw_angle(&u.components, &v.components))
}

/// A closed parameterized curve on one of the model surfaces.
///
/// Implementors supply position and an analytic velocity. The default
/// acceleration is a central difference of the velocity with step `1e-5`.
pub trait Curve {
    fn geometry(&self) -> Geometry;

    fn position(&self, t: f64) -> Vec3;

    fn velocity(&self, t: f64) -> Vec3;

    fn acceleration(&self, t: f64) -> Vec3 {
        let h = 1e-5;
        (self.velocity(t + h) - self.velocity(t - h)) / (2.0 * h)
    }

    fn period(&self) -> f64 {
        TAU
    }

    /// Arc length from parameter 0 to `t` (any real `t`).
    fn arc_length(&self, t: f64) -> f64 {
        numeric_arc_length(self, t)
    }

    fn length(&self) -> f64 {
        self.arc_length(self.period())
    }

    /// Inverse of [`Curve::arc_length`].
    fn param_at_arc_length(&self, s: f64) -> f64 {
        numeric_param_at_arc_length(self, s)
    }

    /// Ambient position at arc length `s` in double-double precision, for
    /// curves with closed forms accurate enough to support it.
    fn position_at_arc_length_dd(&self, _s: Dd) -> Option<DdVec3> {
        None
    }

    fn point(&self, t: f64) -> SurfacePoint {
        SurfacePoint {
            geometry: self.geometry(),
            coords: self.position(t),
        }
    }

    fn tangent(&self, t: f64) -> TangentVector {
        TangentVector {
            base: self.point(t),
            components: self.velocity(t),
        }
    }
}

impl<C: Curve + ?Sized> Curve for &C {
    fn geometry(&self) -> Geometry {
        (**self).geometry()
    }
    fn position(&self, t: f64) -> Vec3 {
        (**self).position(t)
    }
    fn velocity(&self, t: f64) -> Vec3 {
        (**self).velocity(t)
    }
    fn acceleration(&self, t: f64) -> Vec3 {
        (**self).acceleration(t)
    }
    fn period(&self) -> f64 {
        (**self).period()
    }
    fn arc_length(&self, t: f64) -> f64 {
        (**self).arc_length(t)
    }
    fn length(&self) -> f64 {
        (**self).length()
    }
    fn param_at_arc_length(&self, s: f64) -> f64 {
        (**self).param_at_arc_length(s)
    }
    fn position_at_arc_length_dd(&self, s: Dd) -> Option<DdVec3> {
        (**self).position_at_arc_length_dd(s)
    }
}

impl<C: Curve + ?Sized> Curve for Box<C> {
    fn geometry(&self) -> Geometry {
        (**self).geometry()
    }
    fn position(&self, t: f64) -> Vec3 {
        (**self).position(t)
    }
    fn velocity(&self, t: f64) -> Vec3 {
        (**self).velocity(t)
    }
    fn acceleration(&self, t: f64) -> Vec3 {
        (**self).acceleration(t)
    }
    fn period(&self) -> f64 {
        (**self).period()
    }
    fn arc_length(&self, t: f64) -> f64 {
        (**self).arc_length(t)
    }
    fn length(&self) -> f64 {
        (**self).length()
    }
    fn param_at_arc_length(&self, s: f64) -> f64 {
        (**self).param_at_arc_length(s)
    }
    fn position_at_arc_length_dd(&self, s: Dd) -> Option<DdVec3> {
        (**self).position_at_arc_length_dd(s)
    }
}

// 8-point Gauss-Legendre on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];
const ARC_PANELS: usize = 256;

fn speed<C: Curve + ?Sized>(c: &C, t: f64) -> f64 {
    c.geometry().norm(&c.velocity(t))
}

fn gauss_legendre<C: Curve + ?Sized>(c: &C, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS.iter())
        .map(|(x, w)| w * speed(c, mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite Gauss-Legendre arc length from 0 to `t`.
pub fn numeric_arc_length<C: Curve + ?Sized>(c: &C, t: f64) -> f64 {
    let period = c.period();
    let turns = (t / period).floor();
    let rem = t - turns * period;
    let panel = period / ARC_PANELS as f64;
    let full_panels = (rem / panel).floor() as usize;
    let mut total = 0.0;
    let mut whole = 0.0;
    if turns != 0.0 {
        for i in 0..ARC_PANELS {
            whole += gauss_legendre(c, i as f64 * panel, (i + 1) as f64 * panel);
        }
    }
    for i in 0..full_panels.min(ARC_PANELS) {
        total += gauss_legendre(c, i as f64 * panel, (i + 1) as f64 * panel);
    }
    let start = full_panels as f64 * panel;
    if rem > start {
        total += gauss_legendre(c, start, rem);
    }
    turns * whole + total
}

/// Newton iteration on [`Curve::arc_length`] seeded at the mean speed.
pub fn numeric_param_at_arc_length<C: Curve + ?Sized>(c: &C, s: f64) -> f64 {
    let length = c.length();
    let mut t = s / length * c.period();
    for _ in 0..60 {
        let f = c.arc_length(t) - s;
        let step = f / speed(c, t);
        t -= step;
        if step.abs() < 1e-15 * t.abs().max(1.0) {
            break;
        }
    }
    t
}

/// A geodesic circle of radius `R` centred at the origin / north pole /
/// hyperboloid vertex, traversed counterclockwise in the angle `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleCurve {
    geometry: Geometry,
    radius: f64,
}

impl CircleCurve {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Closed-form geodesic curvature: `1/R`, `cot R` or `coth R`.
    pub fn curvature(&self) -> f64 {
        1.0 / self.geometry.tan_like(self.radius)
    }

    /// `sin R`-like factor: the speed of the angle parameterization.
    fn speed(&self) -> f64 {
        self.geometry.sin_like(self.radius)
    }
}

pub fn check_radius(geometry: Geometry, radius: f64) -> Result<()> {
    let ok = radius.is_finite() && radius > 0.0 && (geometry != Geometry::Spherical || radius < 0.5 * PI);
    if ok {
        Ok(())
    } else {
        Err(Error::BadRadius(radius))
    }
}

pub fn circle_curve(geometry: Geometry, radius: f64) -> Result<CircleCurve> {
    check_radius(geometry, radius)?;
    Ok(CircleCurve { geometry, radius })
}

impl Curve for CircleCurve {
    fn geometry(&self) -> Geometry {
        self.geometry
    }

    fn position(&self, t: f64) -> Vec3 {
        let (s, c) = t.sin_cos();
        let r = self.radius;
        match self.geometry {
            Geometry::Euclidean => Vec3::new(r * c, r * s, 0.0),
            Geometry::Spherical => Vec3::new(r.sin() * c, r.sin() * s, r.cos()),
            Geometry::Hyperbolic => Vec3::new(r.cosh(), r.sinh() * c, r.sinh() * s),
        }
    }

    fn velocity(&self, t: f64) -> Vec3 {
        let (s, c) = t.sin_cos();
        let w = self.speed();
        match self.geometry {
            Geometry::Hyperbolic => Vec3::new(0.0, -w * s, w * c),
            _ => Vec3::new(-w * s, w * c, 0.0),
        }
    }

    fn acceleration(&self, t: f64) -> Vec3 {
        let (s, c) = t.sin_cos();
        let w = self.speed();
        match self.geometry {
            Geometry::Hyperbolic => Vec3::new(0.0, -w * c, -w * s),
            _ => Vec3::new(-w * c, -w * s, 0.0),
        }
    }

    fn arc_length(&self, t: f64) -> f64 {
        self.speed() * t
    }

    fn length(&self) -> f64 {
        TAU * self.speed()
    }

    fn param_at_arc_length(&self, s: f64) -> f64 {
        s / self.speed()
    }

    fn position_at_arc_length_dd(&self, s: Dd) -> Option<DdVec3> {
        let r = dd(self.radius);
        let zero = dd(0.0);
        Some(match self.geometry {
            Geometry::Euclidean => {
                let (sn, cs) = (s / r).sin_cos();
                [r * cs, r * sn, zero]
            }
            Geometry::Spherical => {
                let (sr, cr) = r.sin_cos();
                let (sn, cs) = (s / sr).sin_cos();
                [sr * cs, sr * sn, cr]
            }
            Geometry::Hyperbolic => {
                let (sh, ch) = sinh_cosh(r);
                let (sn, cs) = (s / sh).sin_cos();
                [ch, sh * cs, sh * sn]
            }
        })
    }
}

/// Signed geodesic curvature at `t`, positive for counterclockwise convex
/// curves, from the covariant derivative of the unit tangent.
pub fn geodesic_curvature<C: Curve + ?Sized>(curve: &C, t: f64) -> Result<f64> {
    let g = curve.geometry();
    let v = curve.velocity(t);
    if g.norm(&v) < 1e-10 {
        return Err(Error::DegenerateVelocity(t));
    }
    let p = curve.position(t);
    let a = curve.acceleration(t);
    Ok(g.curvature_from_derivatives(&p, &v, &a))
}

/// Outcome of launching a geodesic chord from a curve point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    /// Arrival parameter, strictly inside `(t0, t0 + period)`.
    pub t1: f64,
    /// Angle in `(0, π)` between the arriving chord and the forward tangent.
    pub arrival_angle: f64,
    pub chord_length: f64,
}

const SHOOT_GRID: usize = 256;
const SHOOT_GUARD: f64 = 1e-6;

/// Launches a geodesic from `curve(t0)` at angle `theta` to the forward
/// tangent, into the convex (left) side, and finds where it next meets the
/// curve.
pub fn shoot_to_curve<C: Curve + ?Sized>(curve: &C, t0: f64, theta: f64) -> Result<Shot> {
    if !(theta > SHOOT_GUARD && theta < PI - SHOOT_GUARD) {
        return Err(Error::Tangential(theta));
    }
    let g = curve.geometry();
    let p0 = curve.position(t0);
    let v0 = curve.velocity(t0);
    let speed0 = g.norm(&v0);
    if speed0 < 1e-10 {
        return Err(Error::DegenerateVelocity(t0));
    }
    let tangent = v0 / speed0;
    let normal = g.left_normal(&p0, &tangent);
    let u = tangent * theta.cos() + normal * theta.sin();

    // Signed offset of a curve point from the launched geodesic. For the
    // sphere and the hyperboloid the geodesic is the section by the plane
    // through the origin spanned by p0 and u.
    let plane = p0.cross(&u);
    let offset = |t: f64| -> f64 {
        let q = curve.position(t);
        match g {
            Geometry::Euclidean => u.x * (q.y - p0.y) - u.y * (q.x - p0.x),
            _ => q.dot(&plane),
        }
    };

    let period = curve.period();
    let lo = t0 + SHOOT_GUARD;
    let span = period - 2.0 * SHOOT_GUARD;
    let step = span / SHOOT_GRID as f64;
    let mut a = lo;
    let mut fa = offset(a);
    let mut bracket = None;
    for j in 1..=SHOOT_GRID {
        let b = lo + j as f64 * step;
        let fb = offset(b);
        if fa != 0.0 && fa * fb <= 0.0 {
            bracket = Some((a, b, fa));
            break;
        }
        a = b;
        fa = fb;
    }
    let (mut a, mut b, mut fa) = bracket.ok_or(Error::NoIntersection(t0))?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = offset(m);
        if fm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let t1 = 0.5 * (a + b);

    let p1 = curve.position(t1);
    let v1 = curve.velocity(t1);
    let arriving = -g.direction_towards(&p1, &p0);
    let arrival_angle = g.raw_angle(&arriving, &v1);
    let chord_length = g.raw_distance(&p0, &p1);
    Ok(Shot {
        t1,
        arrival_angle,
        chord_length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn geodesic_points() {
        let e = Geodesic::through(TangentVector::projected(
            SurfacePoint::euclidean(0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
        ))
        .unwrap();
        let q = geodesic_point(&e, 2.0);
        assert!(close(q.coords().x, 2.0, 1e-15) && close(q.coords().y, 0.0, 1e-15));

        let s = Geodesic::new(
            TangentVector::new(
                SurfacePoint::spherical(0.0, 0.0, 1.0).unwrap(),
                Vec3::new(1.0, 0.0, 0.0),
            )
            .unwrap(),
        )
        .unwrap();
        let q = geodesic_point(&s, FRAC_PI_2);
        assert!((q.coords() - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);

        let h = Geodesic::new(
            TangentVector::new(
                SurfacePoint::hyperbolic(1.0, 0.0, 0.0).unwrap(),
                Vec3::new(0.0, 1.0, 0.0),
            )
            .unwrap(),
        )
        .unwrap();
        let q = geodesic_point(&h, 0.8);
        // cosh 0.8 and sinh 0.8 from their power series.
        let (mut ch, mut sh, mut term) = (0.0, 0.0, 1.0);
        for n in 0..30 {
            if n % 2 == 0 {
                ch += term;
            } else {
                sh += term;
            }
            term *= 0.8 / (n + 1) as f64;
        }
        assert!(close(q.coords().x, ch, 1e-14));
        assert!(close(q.coords().y, sh, 1e-14));
        assert!(close(ch, 1.33743, 1e-5) && close(sh, 0.88811, 1e-5));
        assert!(q.coords().z.abs() < 1e-15);
    }

    #[test]
    fn distances() {
        let d = distance(&SurfacePoint::euclidean(0.0, 0.0), &SurfacePoint::euclidean(3.0, 4.0)).unwrap();
        assert!(close(d, 5.0, 1e-15));
        let d = distance(
            &SurfacePoint::spherical(0.0, 0.0, 1.0).unwrap(),
            &SurfacePoint::spherical(1.0, 0.0, 0.0).unwrap(),
        )
        .unwrap();
        assert!(close(d, FRAC_PI_2, 1e-15));
        let d = distance(
            &SurfacePoint::hyperbolic(1.0, 0.0, 0.0).unwrap(),
            &SurfacePoint::hyperbolic(1f64.cosh(), 1f64.sinh(), 0.0).unwrap(),
        )
        .unwrap();
        assert!(close(d, 1.0, 1e-14));
        assert_eq!(
            distance(
                &SurfacePoint::euclidean(0.0, 0.0),
                &SurfacePoint::spherical(1.0, 0.0, 0.0).unwrap()
            ),
            Err(Error::MixedGeometry)
        );
    }

    #[test]
    fn off_manifold_points_are_rejected() {
        assert!(SurfacePoint::spherical(1.0, 1.0, 0.0).is_err());
        assert!(SurfacePoint::hyperbolic(-1.0, 0.0, 0.0).is_err());
        assert!(SurfacePoint::hyperbolic(2.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn angles() {
        let p = SurfacePoint::spherical(0.0, 0.0, 1.0).unwrap();
        let u = TangentVector::new(p, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let v = TangentVector::new(p, Vec3::new(0.0, 1.0, 0.0)).unwrap();
        assert!(close(angle_between(&u, &v).unwrap(), FRAC_PI_2, 1e-15));
        assert!(close(angle_between(&u, &u).unwrap(), 0.0, 1e-15));

        let o = SurfacePoint::euclidean(0.0, 0.0);
        let a = TangentVector::projected(o, Vec3::new(1.0, 0.0, 0.0));
        let b = TangentVector::projected(o, Vec3::new(1.0, 1.0, 0.0));
        assert!(close(angle_between(&a, &b).unwrap(), FRAC_PI_4, 1e-15));
        let z = TangentVector::projected(o, Vec3::zeros());
        assert_eq!(angle_between(&a, &z), Err(Error::ZeroVector));
        assert!(TangentVector::new(p, Vec3::new(0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn circle_curvature_and_length() {
        let s = circle_curve(Geometry::Spherical, FRAC_PI_3).unwrap();
        let h = circle_curve(Geometry::Hyperbolic, 0.8).unwrap();
        let e = circle_curve(Geometry::Euclidean, 2.0).unwrap();
        for i in 0..32 {
            let t = 0.2 * i as f64;
            let ks = geodesic_curvature(&s, t).unwrap();
            assert!(close(ks, 1.0 / FRAC_PI_3.tan(), 1e-8));
            assert!(close(ks, 0.57735, 1e-5));
            let kh = geodesic_curvature(&h, t).unwrap();
            assert!(close(kh, 1.0 / 0.8f64.tanh(), 1e-8));
            assert!(close(kh, 1.505941, 1e-6));
            assert!(close(geodesic_curvature(&e, t).unwrap(), 0.5, 1e-12));
        }
        assert!(close(e.length(), 4.0 * PI, 1e-12));
        assert!(close(s.length(), TAU * FRAC_PI_3.sin(), 1e-12));
        assert!(close(h.length(), TAU * 0.8f64.sinh(), 1e-12));
        assert!(close(numeric_arc_length(&h, TAU), h.length(), 1e-12));
        let q = circle_curve(Geometry::Spherical, FRAC_PI_4).unwrap();
        assert!(close(geodesic_curvature(&q, 0.3).unwrap(), 1.0, 1e-12));
    }

    /// Curvature recomputed from positions only, by second differences.
    fn fd_curvature<C: Curve>(c: &C, t: f64) -> f64 {
        let h = 1e-4;
        let g = c.geometry();
        let p = c.position(t);
        let v = (c.position(t + h) - c.position(t - h)) / (2.0 * h);
        let a = (c.position(t + h) - 2.0 * p + c.position(t - h)) / (h * h);
        g.curvature_from_derivatives(&p, &v, &a)
    }

    #[test]
    fn finite_difference_curvature_oracle_agrees_with_circles() {
        for (g, r) in [
            (Geometry::Euclidean, 1.3),
            (Geometry::Spherical, 1.1),
            (Geometry::Hyperbolic, 0.8),
        ] {
            let c = circle_curve(g, r).unwrap();
            for i in 0..10 {
                let t = 0.6 * i as f64;
                assert!(close(fd_curvature(&c, t), c.curvature(), 1e-6));
            }
        }
    }

    #[test]
    fn bad_radius() {
        assert_eq!(
            circle_curve(Geometry::Spherical, 1.6).unwrap_err(),
            Error::BadRadius(1.6)
        );
        assert!(circle_curve(Geometry::Hyperbolic, -1.0).is_err());
        assert!(circle_curve(Geometry::Euclidean, 0.0).is_err());
    }

    #[test]
    fn shooting_on_unit_circle() {
        let c = circle_curve(Geometry::Euclidean, 1.0).unwrap();
        for t0 in [0.0, 1.0, 4.0] {
            let s = shoot_to_curve(&c, t0, FRAC_PI_2).unwrap();
            assert!(close(s.t1, t0 + PI, 1e-12));
            assert!(close(s.arrival_angle, FRAC_PI_2, 1e-12));
            assert!(close(s.chord_length, 2.0, 1e-12));
            let s = shoot_to_curve(&c, t0, FRAC_PI_3).unwrap();
            assert!(close(s.chord_length, 3f64.sqrt(), 1e-12));
            assert!(close(s.arrival_angle, FRAC_PI_3, 1e-12));
            assert!(close(s.t1, t0 + 2.0 * FRAC_PI_3, 1e-12));
        }
        assert_eq!(shoot_to_curve(&c, 0.0, 1e-7).unwrap_err(), Error::Tangential(1e-7));
    }

    #[test]
    fn shooting_on_spherical_circle_reproduces_chord_constants() {
        // cot c = cos R cot α with R = π/3, α = π/4 gives c = arccot(1/2).
        let c = (2.0f64).atan();
        let circle = circle_curve(Geometry::Spherical, FRAC_PI_3).unwrap();
        let s = shoot_to_curve(&circle, -c, FRAC_PI_4).unwrap();
        assert!(close(s.t1, c, 1e-12));
        assert!(close(s.arrival_angle, FRAC_PI_4, 1e-12));
    }

    #[test]
    fn shooting_is_reversible() {
        for (g, r) in [
            (Geometry::Euclidean, 1.0),
            (Geometry::Spherical, 1.2),
            (Geometry::Hyperbolic, 0.8),
        ] {
            let c = circle_curve(g, r).unwrap();
            for (t0, th) in [(0.3, 0.4), (2.0, 1.9), (5.0, 2.9)] {
                let s = shoot_to_curve(&c, t0, th).unwrap();
                let back = shoot_to_curve(&c, s.t1, PI - s.arrival_angle).unwrap();
                let dt = (back.t1 - t0).rem_euclid(TAU);
                assert!(dt < 1e-8 || TAU - dt < 1e-8, "{g:?} {dt}");
                assert!(close(back.arrival_angle, PI - th, 1e-8));
            }
        }
    }
}
