//! Gutkin curves.
//!
//! # Euclidean curves from the radius of curvature
//!
//! Parameterize a convex curve by the direction `t` of its tangent, so that
//! `γ'(t) = ρ(t) e^{it}` with `ρ = 1/κ` the radius of curvature. Take
//! `ρ(t) = c0 + Σ a_k cos(kt + φ_k)`. The curve closes iff `ρ` has no first
//! harmonic. The chord from `γ(t-α)` to `γ(t+α)` is
//!
//! ```text
//! D(t) = ∫_{-α}^{α} ρ(t+u) e^{i(t+u)} du
//! ```
//!
//! and its component across the direction `t` is
//! `∫_{-α}^{α} ρ(t+u) sin u du`. The constant term contributes nothing. For
//! one harmonic the even part `cos(ku) sin u` integrates to zero too, which
//! leaves
//!
//! ```text
//! a_k sin(kt + φ_k) · [ sin((k+1)α)/(k+1) - sin((k-1)α)/(k-1) ]
//! ```
//!
//! This vanishes for every `t` iff `(k-1) sin((k+1)α) = (k+1) sin((k-1)α)`,
//! the pole-free form of `k tan α = tan kα`. When every harmonic of `ρ`
//! satisfies it for one `α`, each chord `γ(t-α)γ(t+α)` points in direction
//! `t`. The tangents at its ends point in directions `t ∓ α`, so both
//! contact angles are exactly `α`. Verification of such curves is therefore
//! held to rounding error, not to a perturbative order.
//!
//! # Deformed circles on the sphere and hyperboloid
//!
//! A circle of radius `R` about the pole is moved in latitude only:
//! `r(t) = R + ε g(t)` at azimuth `t`. To first order the geodesic curvature
//! changes by `-ε (g + g'') / s(R)²`, with `s = sin` or `sinh`. A harmonic
//! `cos kt` of `g` keeps the chord angle `α` to second order in `ε` exactly
//! when `k tan c = tan kc`, where `c` is the half azimuth spanned by the
//! `α`-chords of the circle.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::angles::{contact_angle_from_c, gutkin_roots, lemma_canda_constants};
use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, Harmonic};
use crate::geometry::{
    check_radius, circle_curve, geodesic_curvature, shoot_to_curve, CircleCurve, Curve, Geometry, Vec3,
};
use crate::precise::{dd, Dd, DdVec3};

const CONVEXITY_GRID: usize = 4096;
const CLOSURE_TOL: f64 = 1e-10;
const ADMISSIBLE_TOL: f64 = 1e-8;

/// Euclidean curve data: radius of curvature `c0 + Σ amp cos(kt + phase)`
/// in the turning-angle parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCurveE2 {
    pub c0: f64,
    #[serde(default)]
    pub harmonics: Vec<Harmonic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl FourierCurveE2 {
    pub fn new(c0: f64, harmonics: Vec<Harmonic>) -> Self {
        Self {
            c0,
            harmonics,
            alpha: None,
        }
    }

    pub fn radius_of_curvature(&self) -> FourierSeries {
        FourierSeries::new(self.c0, self.harmonics.clone())
    }
}

/// `∫_0^t ρ(s)(cos s, sin s) ds` up to a constant, term by term.
fn antiderivative(rho: &FourierSeries, t: f64) -> (f64, f64) {
    let mut x = rho.constant * t.sin();
    let mut y = -rho.constant * t.cos();
    for h in &rho.harmonics {
        let (k, a, p) = (f64::from(h.k), h.amp, h.phase);
        let up = (k + 1.0) * t + p;
        x += 0.5 * a * up.sin() / (k + 1.0);
        y -= 0.5 * a * up.cos() / (k + 1.0);
        if h.k == 1 {
            x += 0.5 * a * t * p.cos();
            y -= 0.5 * a * t * p.sin();
        } else {
            let down = (k - 1.0) * t + p;
            x += 0.5 * a * down.sin() / (k - 1.0);
            y += 0.5 * a * down.cos() / (k - 1.0);
        }
    }
    (x, y)
}

fn antiderivative_dd(rho: &FourierSeries, t: Dd) -> (Dd, Dd) {
    let (st, ct) = t.sin_cos();
    let mut x = st * rho.constant;
    let mut y = -(ct * rho.constant);
    for h in &rho.harmonics {
        let (k, a, p) = (f64::from(h.k), h.amp, h.phase);
        let (su, cu) = (t * (k + 1.0) + p).sin_cos();
        x += su * (0.5 * a / (k + 1.0));
        y -= cu * (0.5 * a / (k + 1.0));
        let (sd, cd) = (t * (k - 1.0) + p).sin_cos();
        x += sd * (0.5 * a / (k - 1.0));
        y += cd * (0.5 * a / (k - 1.0));
    }
    (x, y)
}

/// `|γ(2π) - γ(0)|` for the given radius of curvature. Only first
/// harmonics contribute: `π · amp` each.
pub fn closure_defect(spec: &FourierCurveE2) -> f64 {
    let rho = spec.radius_of_curvature();
    let (x0, y0) = antiderivative(&rho, 0.0);
    let (x1, y1) = antiderivative(&rho, TAU);
    (x1 - x0).hypot(y1 - y0)
}

/// A closed convex Euclidean curve in the turning-angle parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct E2FourierCurve {
    rho: FourierSeries,
    rho_prime: FourierSeries,
    origin: (f64, f64),
    origin_dd: (Dd, Dd),
}

pub fn build_e2_curve(spec: &FourierCurveE2) -> Result<E2FourierCurve> {
    if !(spec.c0.is_finite() && spec.c0 > 0.0) {
        return Err(Error::InvalidSpec(format!("c0 = {} must be positive", spec.c0)));
    }
    if spec
        .harmonics
        .iter()
        .any(|h| h.k == 0 || !h.amp.is_finite() || !h.phase.is_finite())
    {
        return Err(Error::InvalidSpec(
            "harmonics need k >= 1 and finite coefficients; fold k = 0 into c0".into(),
        ));
    }
    let defect = closure_defect(spec);
    if defect > CLOSURE_TOL {
        return Err(Error::NotClosed(defect));
    }
    let rho = spec.radius_of_curvature();
    if rho.certified_min(CONVEXITY_GRID) <= 0.0 {
        return Err(Error::NotConvex);
    }
    let origin = antiderivative(&rho, 0.0);
    let origin_dd = antiderivative_dd(&rho, dd(0.0));
    Ok(E2FourierCurve {
        rho_prime: rho.derivative(),
        rho,
        origin,
        origin_dd,
    })
}

impl E2FourierCurve {
    pub fn radius_of_curvature(&self) -> &FourierSeries {
        &self.rho
    }

    /// `1/ρ(t)`.
    pub fn curvature(&self, t: f64) -> f64 {
        1.0 / self.rho.eval(t)
    }

    fn arc_length_dd(&self, t: Dd) -> Dd {
        let mut s = t * self.rho.constant;
        for h in &self.rho.harmonics {
            let k = f64::from(h.k);
            s += ((t * k + h.phase).sin() - h.phase.sin()) * (h.amp / k);
        }
        s
    }
}

impl Curve for E2FourierCurve {
    fn geometry(&self) -> Geometry {
        Geometry::Euclidean
    }

    fn position(&self, t: f64) -> Vec3 {
        let (x, y) = antiderivative(&self.rho, t);
        Vec3::new(x - self.origin.0, y - self.origin.1, 0.0)
    }

    fn velocity(&self, t: f64) -> Vec3 {
        let r = self.rho.eval(t);
        let (s, c) = t.sin_cos();
        Vec3::new(r * c, r * s, 0.0)
    }

    fn acceleration(&self, t: f64) -> Vec3 {
        let r = self.rho.eval(t);
        let dr = self.rho_prime.eval(t);
        let (s, c) = t.sin_cos();
        Vec3::new(dr * c - r * s, dr * s + r * c, 0.0)
    }

    fn arc_length(&self, t: f64) -> f64 {
        let mut s = self.rho.constant * t;
        for h in &self.rho.harmonics {
            let k = f64::from(h.k);
            s += h.amp / k * ((k * t + h.phase).sin() - h.phase.sin());
        }
        s
    }

    fn length(&self) -> f64 {
        TAU * self.rho.constant
    }

    fn param_at_arc_length(&self, s: f64) -> f64 {
        let mut t = s / self.rho.constant;
        for _ in 0..50 {
            let step = (self.arc_length(t) - s) / self.rho.eval(t);
            t -= step;
            if step.abs() <= 1e-16 * t.abs().max(1.0) {
                break;
            }
        }
        t
    }

    fn position_at_arc_length_dd(&self, s: Dd) -> Option<DdVec3> {
        let mut t = dd(self.param_at_arc_length(s.hi()));
        for _ in 0..2 {
            t -= (self.arc_length_dd(t) - s) / self.rho.eval(t.hi());
        }
        let (x, y) = antiderivative_dd(&self.rho, t);
        Some([x - self.origin_dd.0, y - self.origin_dd.1, dd(0.0)])
    }
}

/// `k cos kα - cot α sin kα`: the factor the Euclidean residual operator
/// applies to a harmonic `cos kt` (up to `-2 sin kt`).
pub fn e2_harmonic_coefficient(k: u32, alpha: f64) -> f64 {
    let k = f64::from(k);
    k * (k * alpha).cos() - (k * alpha).sin() / alpha.tan()
}

/// `t ↦ f'(t+α) + f'(t-α) - cot α (f(t+α) - f(t-α))`.
pub fn e2_residual_operator(f: &FourierSeries, alpha: f64) -> impl Fn(f64) -> f64 + '_ {
    let df = f.derivative();
    let cot = 1.0 / alpha.tan();
    move |t| df.eval(t + alpha) + df.eval(t - alpha) - cot * (f.eval(t + alpha) - f.eval(t - alpha))
}

/// Largest `|op(t)|` over `n` equally spaced points of one period.
pub fn max_abs_on_grid(op: impl Fn(f64) -> f64, n: usize) -> f64 {
    (0..n).map(|i| op(TAU * i as f64 / n as f64).abs()).fold(0.0, f64::max)
}

/// Chord length `2 sin α (c0 + Σ amp cos kα cos(kt + phase))` of the
/// chord `γ(t-α) → γ(t+α)`. Equal to `f(t-α) + f(t+α)` with `f = ρ sin α`.
pub fn gutkin_chord_length_formula(spec: &FourierCurveE2, alpha: f64, t: f64) -> Result<f64> {
    let mut mean = spec.c0;
    for h in spec.harmonics.iter().filter(|h| h.amp != 0.0) {
        let residual = e2_harmonic_coefficient(h.k, alpha).abs();
        if residual > ADMISSIBLE_TOL {
            return Err(Error::NotAdmissible {
                k: h.k,
                alpha,
                residual,
            });
        }
        let k = f64::from(h.k);
        mean += h.amp * (k * alpha).cos() * (k * t + h.phase).cos();
    }
    Ok(2.0 * alpha.sin() * mean)
}

/// `f*` with `tan f* = sin α tan R` (S²) or `tanh f* = sin α tanh R` (H²):
/// the constant solution of the nonlinear chord equation of a circle.
pub fn f_star(geometry: Geometry, radius: f64, alpha: f64) -> Result<f64> {
    check_radius(geometry, radius)?;
    match geometry {
        Geometry::Spherical => Ok((alpha.sin() * radius.tan()).atan()),
        Geometry::Hyperbolic => Ok((alpha.sin() * radius.tanh()).atanh()),
        Geometry::Euclidean => Err(Error::NotApplicable("f* is defined on S² and H² only".into())),
    }
}

/// A circle of radius `R` on S² or H² with latitude perturbation `ε g`,
/// together with the chord constants of the unperturbed circle at `α`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeformedCircle {
    pub geometry: Geometry,
    #[serde(rename = "R")]
    pub radius: f64,
    pub epsilon: f64,
    pub g: FourierSeries,
    pub alpha: f64,
    pub c: f64,
    pub a: f64,
    pub f_star: f64,
}

impl DeformedCircle {
    pub fn new(geometry: Geometry, radius: f64, epsilon: f64, g: FourierSeries, alpha: f64) -> Result<Self> {
        if geometry == Geometry::Euclidean {
            return Err(Error::NotApplicable("deformed circles live on S² or H²".into()));
        }
        if g.has_first_harmonic() {
            return Err(Error::FirstHarmonic);
        }
        let consts = lemma_canda_constants(geometry, radius, alpha)?;
        Ok(Self {
            geometry,
            radius,
            epsilon,
            g,
            alpha,
            c: consts.c,
            a: consts.a,
            f_star: f_star(geometry, radius, alpha)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformedCircleCurve {
    geometry: Geometry,
    radius: f64,
    epsilon: f64,
    g: FourierSeries,
    dg: FourierSeries,
    ddg: FourierSeries,
}

pub fn build_deformed_circle(spec: &DeformedCircle) -> Result<DeformedCircleCurve> {
    deformed_circle_curve(spec.geometry, spec.radius, spec.epsilon, &spec.g)
}

/// The curve of a [`DeformedCircle`] without the chord constants.
pub fn deformed_circle_curve(
    geometry: Geometry,
    radius: f64,
    epsilon: f64,
    g: &FourierSeries,
) -> Result<DeformedCircleCurve> {
    if geometry == Geometry::Euclidean {
        return Err(Error::NotApplicable("deformed circles live on S² or H²".into()));
    }
    check_radius(geometry, radius)?;
    if g.has_first_harmonic() {
        return Err(Error::FirstHarmonic);
    }
    let dg = g.derivative();
    let curve = DeformedCircleCurve {
        geometry,
        radius,
        epsilon,
        g: g.clone(),
        ddg: dg.derivative(),
        dg,
    };
    let bound = epsilon.abs() * (g.constant.abs() + g.harmonics.iter().map(|h| h.amp.abs()).sum::<f64>());
    check_radius(geometry, radius - bound).and(check_radius(geometry, radius + bound))?;
    for i in 0..CONVEXITY_GRID {
        let t = TAU * i as f64 / CONVEXITY_GRID as f64;
        if geodesic_curvature(&curve, t)? <= 0.0 {
            return Err(Error::NotConvex);
        }
    }
    Ok(curve)
}

impl DeformedCircleCurve {
    /// Distance from the pole at azimuth `t`.
    pub fn latitude(&self, t: f64) -> f64 {
        self.radius + self.epsilon * self.g.eval(t)
    }

    pub fn max_latitude_deviation(&self, n: usize) -> f64 {
        max_abs_on_grid(|t| self.epsilon * self.g.eval(t), n)
    }

    fn radial(&self, t: f64) -> (f64, f64, f64) {
        let e = self.epsilon;
        (self.latitude(t), e * self.dg.eval(t), e * self.ddg.eval(t))
    }

    /// `(s, s')`: `(sin r, cos r)` or `(sinh r, cosh r)`.
    fn profile(&self, r: f64) -> (f64, f64) {
        match self.geometry {
            Geometry::Hyperbolic => (r.sinh(), r.cosh()),
            _ => r.sin_cos(),
        }
    }
}

impl Curve for DeformedCircleCurve {
    fn geometry(&self) -> Geometry {
        self.geometry
    }

    fn position(&self, t: f64) -> Vec3 {
        let r = self.latitude(t);
        let (sn, cs) = t.sin_cos();
        let (s, c) = self.profile(r);
        match self.geometry {
            Geometry::Hyperbolic => Vec3::new(c, s * cs, s * sn),
            _ => Vec3::new(s * cs, s * sn, c),
        }
    }

    fn velocity(&self, t: f64) -> Vec3 {
        let (r, dr, _) = self.radial(t);
        let (sn, cs) = t.sin_cos();
        let (s, c) = self.profile(r);
        match self.geometry {
            Geometry::Hyperbolic => Vec3::new(s * dr, c * dr * cs - s * sn, c * dr * sn + s * cs),
            _ => Vec3::new(c * dr * cs - s * sn, c * dr * sn + s * cs, -s * dr),
        }
    }

    fn acceleration(&self, t: f64) -> Vec3 {
        let (r, dr, ddr) = self.radial(t);
        let (sn, cs) = t.sin_cos();
        let (s, c) = self.profile(r);
        match self.geometry {
            Geometry::Hyperbolic => {
                let radial = s * dr * dr + c * ddr - s;
                Vec3::new(
                    c * dr * dr + s * ddr,
                    cs * radial - 2.0 * c * dr * sn,
                    sn * radial + 2.0 * c * dr * cs,
                )
            }
            _ => {
                let radial = -s * dr * dr + c * ddr - s;
                Vec3::new(
                    cs * radial - 2.0 * c * dr * sn,
                    sn * radial + 2.0 * c * dr * cs,
                    -c * dr * dr - s * ddr,
                )
            }
        }
    }
}

/// First-order curvature change `κ1` with `κ_ε ≈ κ_0 + ε κ1` for a circle
/// of radius `R` whose distance from the centre is perturbed by `ε g`:
/// `κ1 = -(g + g'') / s(R)²`.
pub fn curvature_response(geometry: Geometry, radius: f64, g: &FourierSeries) -> FourierSeries {
    let s = geometry.sin_like(radius);
    let scale = -1.0 / (s * s);
    let harmonics = g
        .harmonics
        .iter()
        .map(|h| {
            let k = f64::from(h.k);
            Harmonic::new(h.k, scale * (1.0 - k * k) * h.amp, h.phase)
        })
        .collect();
    FourierSeries::new(scale * g.constant, harmonics)
}

/// `t ↦ a cot α (S(f(t+c)) - S(f(t-c))) - (f'(t+c) + f'(t-c))` with
/// `S = sin` on S², `sinh` on H² and the identity on E².
pub fn s2_residual_operator(
    f: &FourierSeries,
    alpha: f64,
    c: f64,
    a: f64,
    geometry: Geometry,
) -> impl Fn(f64) -> f64 + '_ {
    let df = f.derivative();
    let scale = a / alpha.tan();
    move |t| {
        let (f1, f2) = (f.eval(t + c), f.eval(t - c));
        scale * (geometry.sin_like(f1) - geometry.sin_like(f2)) - (df.eval(t + c) + df.eval(t - c))
    }
}

/// `(a cot α cos f*, cot c)` on S², `(a cot α cosh f*, cot c)` on H² and
/// `(cot α, cot c)` on E². The two agree for every circle, which reduces
/// the linearized chord equation to `k tan c = tan kc`.
pub fn linearized_coefficient_check(geometry: Geometry, radius: f64, alpha: f64) -> Result<(f64, f64)> {
    if geometry != Geometry::Euclidean {
        check_radius(geometry, radius)?;
    }
    let consts = lemma_canda_constants(geometry, radius, alpha)?;
    let cot_alpha = 1.0 / alpha.tan();
    let lhs = match geometry {
        Geometry::Euclidean => cot_alpha,
        Geometry::Spherical => consts.a * cot_alpha * f_star(geometry, radius, alpha)?.cos(),
        Geometry::Hyperbolic => consts.a * cot_alpha * f_star(geometry, radius, alpha)?.cosh(),
    };
    Ok((lhs, 1.0 / consts.c.tan()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GutkinReport {
    pub alpha: f64,
    pub samples: usize,
    pub max_angle_residual: f64,
    /// Start parameter of the worst chord.
    pub worst_t: f64,
}

/// Shoots an `α`-chord from `n_samples` equally spaced parameters and
/// records the worst `|arrival angle - α|`.
pub fn verify_curve_gutkin<C: Curve + ?Sized>(curve: &C, alpha: f64, n_samples: usize) -> Result<GutkinReport> {
    let period = curve.period();
    let mut report = GutkinReport {
        alpha,
        samples: n_samples,
        max_angle_residual: 0.0,
        worst_t: 0.0,
    };
    for i in 0..n_samples {
        let t = period * i as f64 / n_samples as f64;
        let shot = shoot_to_curve(curve, t, alpha)?;
        let r = (shot.arrival_angle - alpha).abs();
        if r > report.max_angle_residual {
            report.max_angle_residual = r;
            report.worst_t = t;
        }
    }
    Ok(report)
}

/// A contact angle: a number, or `"auto-kN"` for the first root `c` of
/// `N tan c = tan Nc` mapped to the circle's contact angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleRef {
    Value(f64),
    Named(String),
}

impl AngleRef {
    pub fn resolve(&self, geometry: Geometry, radius: Option<f64>) -> Result<f64> {
        match self {
            AngleRef::Value(a) => Ok(*a),
            AngleRef::Named(name) => {
                let k: u32 = name
                    .strip_prefix("auto-k")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::InvalidSpec(format!("unknown angle reference {name:?}")))?;
                let c = *gutkin_roots(k)
                    .first()
                    .ok_or_else(|| Error::InvalidSpec(format!("k tan c = tan kc has no root for k = {k}")))?;
                match geometry {
                    Geometry::Euclidean => Ok(c),
                    _ => {
                        let r = radius.ok_or_else(|| Error::InvalidSpec("R is required".into()))?;
                        contact_angle_from_c(geometry, r, c)
                    }
                }
            }
        }
    }
}

fn default_geometry() -> Geometry {
    Geometry::Euclidean
}

/// Curve description shared by the library and the command line:
/// Euclidean specs use `c0` and `harmonics`; S²/H² specs use `R`,
/// `epsilon` and `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default = "default_geometry")]
    pub geometry: Geometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub harmonics: Vec<Harmonic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AngleRef>,
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub g: Vec<Harmonic>,
}

/// Either kind of constructed curve.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltCurve {
    Euclidean(E2FourierCurve),
    Circle(CircleCurve),
    Deformed(DeformedCircleCurve),
}

impl CurveSpec {
    pub fn alpha(&self) -> Result<Option<f64>> {
        self.alpha
            .as_ref()
            .map(|a| a.resolve(self.geometry, self.radius))
            .transpose()
    }

    pub fn g_series(&self) -> FourierSeries {
        FourierSeries::new(0.0, self.g.clone())
    }

    pub fn e2(&self) -> Result<FourierCurveE2> {
        let c0 = self
            .c0
            .ok_or_else(|| Error::InvalidSpec("c0 is required for E2 curves".into()))?;
        Ok(FourierCurveE2 {
            c0,
            harmonics: self.harmonics.clone(),
            alpha: self.alpha()?,
        })
    }

    pub fn radius(&self) -> Result<f64> {
        self.radius
            .ok_or_else(|| Error::InvalidSpec("R is required for S2/H2 curves".into()))
    }

    pub fn build(&self) -> Result<BuiltCurve> {
        match self.geometry {
            Geometry::Euclidean => Ok(BuiltCurve::Euclidean(build_e2_curve(&self.e2()?)?)),
            g if self.epsilon == 0.0 || self.g.is_empty() => Ok(BuiltCurve::Circle(circle_curve(g, self.radius()?)?)),
            g => Ok(BuiltCurve::Deformed(deformed_circle_curve(
                g,
                self.radius()?,
                self.epsilon,
                &self.g_series(),
            )?)),
        }
    }

    /// The function whose residual operator certifies the spec: `ρ` for E²
    /// and `f* + ε g` for S²/H².
    pub fn residual_function(&self) -> Result<FourierSeries> {
        match self.geometry {
            Geometry::Euclidean => Ok(self.e2()?.radius_of_curvature()),
            g => {
                let alpha = self
                    .alpha()?
                    .ok_or_else(|| Error::InvalidSpec("alpha is required".into()))?;
                let fs = f_star(g, self.radius()?, alpha)?;
                Ok(FourierSeries::constant(fs).add_scaled(self.epsilon, &self.g_series()))
            }
        }
    }

    /// Max of the matching residual operator over an `n`-point grid.
    pub fn max_residual(&self, n: usize) -> Result<f64> {
        let alpha = self
            .alpha()?
            .ok_or_else(|| Error::InvalidSpec("alpha is required".into()))?;
        let f = self.residual_function()?;
        match self.geometry {
            Geometry::Euclidean => Ok(max_abs_on_grid(e2_residual_operator(&f, alpha), n)),
            g => {
                let consts = lemma_canda_constants(g, self.radius()?, alpha)?;
                Ok(max_abs_on_grid(
                    s2_residual_operator(&f, alpha, consts.c, consts.a, g),
                    n,
                ))
            }
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $c:ident => $e:expr) => {
        match $self {
            BuiltCurve::Euclidean($c) => $e,
            BuiltCurve::Circle($c) => $e,
            BuiltCurve::Deformed($c) => $e,
        }
    };
}

impl Curve for BuiltCurve {
    fn geometry(&self) -> Geometry {
        dispatch!(self, c => c.geometry())
    }
    fn position(&self, t: f64) -> Vec3 {
        dispatch!(self, c => c.position(t))
    }
    fn velocity(&self, t: f64) -> Vec3 {
        dispatch!(self, c => c.velocity(t))
    }
    fn acceleration(&self, t: f64) -> Vec3 {
        dispatch!(self, c => c.acceleration(t))
    }
    fn arc_length(&self, t: f64) -> f64 {
        dispatch!(self, c => c.arc_length(t))
    }
    fn length(&self) -> f64 {
        dispatch!(self, c => c.length())
    }
    fn param_at_arc_length(&self, s: f64) -> f64 {
        dispatch!(self, c => c.param_at_arc_length(s))
    }
    fn position_at_arc_length_dd(&self, s: Dd) -> Option<DdVec3> {
        dispatch!(self, c => c.position_at_arc_length_dd(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn k4() -> FourierCurveE2 {
        FourierCurveE2::new(1.0, vec![Harmonic::cos(4, 0.1)])
    }

    fn alpha4() -> f64 {
        5f64.sqrt().atan()
    }

    #[test]
    fn unit_circle_from_constant_radius() {
        let c = build_e2_curve(&FourierCurveE2::new(1.0, vec![])).unwrap();
        let circle = circle_curve(Geometry::Euclidean, 1.0).unwrap();
        for i in 0..16 {
            let t = 0.4 * i as f64;
            // Same circle, shifted so that γ(0) is the origin.
            let p = c.position(t) + Vec3::new(0.0, -1.0, 0.0);
            let q = circle.position(t - PI / 2.0);
            assert!((p - q).norm() < 1e-14);
        }
    }

    #[test]
    fn perimeter_is_two_pi_c0() {
        let c = build_e2_curve(&k4()).unwrap();
        assert!((c.length() - TAU).abs() < 1e-14);
        assert!((crate::geometry::numeric_arc_length(&c, TAU) - TAU).abs() < 1e-12);
        let s = 2.345;
        assert!((c.arc_length(c.param_at_arc_length(s)) - s).abs() < 1e-14);
    }

    #[test]
    fn position_matches_quadrature_of_velocity() {
        let c = build_e2_curve(&FourierCurveE2::new(
            1.0,
            vec![Harmonic::new(3, 0.3, 0.0), Harmonic::new(5, 0.1, -PI / 2.0)],
        ))
        .unwrap();
        // Simpson on [0, t].
        let t = 2.0;
        let n = 2000;
        let h = t / n as f64;
        let mut acc = c.velocity(0.0) + c.velocity(t);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += c.velocity(i as f64 * h) * w;
        }
        let p = acc * (h / 3.0);
        assert!((p - c.position(t)).norm() < 1e-12);
    }

    #[test]
    fn chords_at_the_root_point_in_direction_t() {
        let c = build_e2_curve(&k4()).unwrap();
        let a = alpha4();
        for i in 0..64 {
            let t = TAU * i as f64 / 64.0;
            let d = c.position(t + a) - c.position(t - a);
            let transverse = d.x * (-t.sin()) + d.y * t.cos();
            assert!(transverse.abs() < 1e-12, "{t}: {transverse}");
        }
    }

    #[test]
    fn first_harmonic_breaks_closure() {
        let mut spec = k4();
        spec.harmonics.push(Harmonic::cos(1, 0.1));
        assert!((closure_defect(&spec) - 0.1 * PI).abs() < 1e-10);
        match build_e2_curve(&spec) {
            Err(Error::NotClosed(d)) => assert!((d - 0.1 * PI).abs() < 1e-10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonconvex_data_is_rejected() {
        let spec = FourierCurveE2::new(1.0, vec![Harmonic::cos(4, 1.2)]);
        assert_eq!(build_e2_curve(&spec).unwrap_err(), Error::NotConvex);
    }

    #[test]
    fn residual_operator_examples() {
        let f = k4().radius_of_curvature();
        assert!(max_abs_on_grid(e2_residual_operator(&f, alpha4()), 4096) < 1e-12);
        assert!(max_abs_on_grid(e2_residual_operator(&f, 1.0), 4096) > 1e-2);
        assert!(max_abs_on_grid(e2_residual_operator(&FourierSeries::constant(3.0), 0.7), 64) < 1e-15);
        // Diagonal action on cos kt.
        for (k, a) in [(3u32, 0.9), (4, 1.0), (6, 0.3)] {
            let f = FourierSeries::new(0.0, vec![Harmonic::cos(k, 0.25)]);
            let m = max_abs_on_grid(e2_residual_operator(&f, a), 4096 * 4);
            let expect = 2.0 * 0.25 * e2_harmonic_coefficient(k, a).abs();
            assert!((m - expect).abs() < 1e-6 * expect.max(1.0), "{k}: {m} vs {expect}");
        }
    }

    #[test]
    fn chord_length_formula_matches_distance() {
        let spec = k4();
        let c = build_e2_curve(&spec).unwrap();
        let a = alpha4();
        let s = (5.0f64 / 6.0).sqrt();
        for i in 0..32 {
            let t = 0.2 * i as f64;
            let l = gutkin_chord_length_formula(&spec, a, t).unwrap();
            let measured = (c.position(t + a) - c.position(t - a)).norm();
            assert!((l - measured).abs() < 1e-10);
            assert!((l - 2.0 * s * (1.0 - (4.0 * t).cos() / 90.0)).abs() < 1e-12);
            let f = |u: f64| spec.radius_of_curvature().eval(u) * a.sin();
            assert!((l - f(t - a) - f(t + a)).abs() < 1e-12);
        }
        assert!(matches!(
            gutkin_chord_length_formula(&spec, 1.0, 0.0),
            Err(Error::NotAdmissible { k: 4, .. })
        ));
    }

    #[test]
    fn euclidean_gutkin_curve_verifies() {
        let c = build_e2_curve(&k4()).unwrap();
        let rep = verify_curve_gutkin(&c, alpha4(), 64).unwrap();
        assert!(rep.max_angle_residual < 1e-8, "{rep:?}");
    }

    #[test]
    fn deformed_circle_basics() {
        let g = FourierSeries::new(0.0, vec![Harmonic::cos(4, 1.0)]);
        let r = PI / 3.0;
        let zero = deformed_circle_curve(Geometry::Spherical, r, 0.0, &g).unwrap();
        let circle = circle_curve(Geometry::Spherical, r).unwrap();
        for i in 0..8 {
            let t = 0.7 * i as f64;
            assert!((zero.position(t) - circle.position(t)).norm() < 1e-15);
        }
        let c = deformed_circle_curve(Geometry::Spherical, r, 1e-3, &g).unwrap();
        assert_eq!(c.max_latitude_deviation(1024), 1e-3);
        let first = FourierSeries::new(0.0, vec![Harmonic::cos(1, 1.0)]);
        assert_eq!(
            DeformedCircle::new(Geometry::Spherical, r, 1e-3, first, 0.8).unwrap_err(),
            Error::FirstHarmonic
        );
    }

    #[test]
    fn deformed_circle_derivatives_match_differences() {
        let g = FourierSeries::new(0.2, vec![Harmonic::cos(4, 1.0), Harmonic::new(6, 0.5, 0.3)]);
        for geom in [Geometry::Spherical, Geometry::Hyperbolic] {
            let c = deformed_circle_curve(geom, 0.9, 5e-3, &g).unwrap();
            let h = 1e-5;
            for i in 0..10 {
                let t = 0.6 * i as f64;
                let v = (c.position(t + h) - c.position(t - h)) / (2.0 * h);
                let a = (c.velocity(t + h) - c.velocity(t - h)) / (2.0 * h);
                assert!((v - c.velocity(t)).norm() < 1e-9);
                assert!((a - c.acceleration(t)).norm() < 1e-9);
                assert!(geom.manifold_defect(&c.position(t)) < 1e-14);
            }
        }
    }

    #[test]
    fn curvature_response_is_pinned_by_finite_differences() {
        // Oracle: curvature from second differences of positions alone.
        fn fd_curvature<C: Curve>(c: &C, t: f64) -> f64 {
            let h = 1e-4;
            let p = c.position(t);
            let v = (c.position(t + h) - c.position(t - h)) / (2.0 * h);
            let a = (c.position(t + h) - 2.0 * p + c.position(t - h)) / (h * h);
            c.geometry().curvature_from_derivatives(&p, &v, &a)
        }
        let g = FourierSeries::new(0.0, vec![Harmonic::cos(4, 1.0)]);
        for (geom, r) in [(Geometry::Spherical, PI / 3.0), (Geometry::Hyperbolic, 0.8)] {
            let eps = 1e-3;
            let plus = deformed_circle_curve(geom, r, eps, &g).unwrap();
            let minus = deformed_circle_curve(geom, r, -eps, &g).unwrap();
            let pred = curvature_response(geom, r, &g);
            for i in 0..12 {
                let t = 0.5 * i as f64;
                let measured = (fd_curvature(&plus, t) - fd_curvature(&minus, t)) / (2.0 * eps);
                assert!(
                    (measured - pred.eval(t)).abs() < 1e-3 * 20.0,
                    "{geom:?} {t}: {measured} vs {}",
                    pred.eval(t)
                );
            }
        }
        // The S² example: amplitude 15 / sin²(π/3) = 20, positive at t = 0.
        let pred = curvature_response(Geometry::Spherical, PI / 3.0, &g);
        assert!((pred.eval(0.0) - 15.0 / 0.75).abs() < 1e-12);
    }

    #[test]
    fn s2_residual_vanishes_at_f_star() {
        for (geom, r, alpha) in [
            (Geometry::Spherical, PI / 3.0, PI / 4.0),
            (Geometry::Hyperbolic, 0.8, 1.1),
        ] {
            let consts = lemma_canda_constants(geom, r, alpha).unwrap();
            let f = FourierSeries::constant(f_star(geom, r, alpha).unwrap());
            let op = s2_residual_operator(&f, alpha, consts.c, consts.a, geom);
            assert!(max_abs_on_grid(op, 256) < 1e-14);
        }
    }

    #[test]
    fn s2_residual_is_second_order_for_roots() {
        let r = PI / 3.0;
        let c4 = gutkin_roots(4)[0];
        let alpha = contact_angle_from_c(Geometry::Spherical, r, c4).unwrap();
        let consts = lemma_canda_constants(Geometry::Spherical, r, alpha).unwrap();
        let fs = f_star(Geometry::Spherical, r, alpha).unwrap();
        let residual = |k: u32, eps: f64| {
            let f = FourierSeries::new(fs, vec![Harmonic::cos(k, eps)]);
            max_abs_on_grid(
                s2_residual_operator(&f, alpha, consts.c, consts.a, Geometry::Spherical),
                2048,
            )
        };
        let scale = consts.a / alpha.tan();
        assert!(residual(4, 1e-5) < 1e-8 * scale);
        let ratio4 = residual(4, 1e-5) / residual(4, 5e-6);
        assert!((ratio4 - 4.0).abs() < 0.2, "{ratio4}");
        let ratio3 = residual(3, 1e-5) / residual(3, 5e-6);
        assert!((ratio3 - 2.0).abs() < 0.05, "{ratio3}");
    }

    #[test]
    fn linearized_coefficients_examples() {
        let (l, r) = linearized_coefficient_check(Geometry::Spherical, PI / 3.0, PI / 4.0).unwrap();
        assert!((l - 0.5).abs() < 1e-12 && (r - 0.5).abs() < 1e-12);
        let (l, r) = linearized_coefficient_check(Geometry::Spherical, 1.0, PI / 2.0).unwrap();
        assert!(l.abs() < 1e-15 && r.abs() < 1e-15);
        let (l, r) = linearized_coefficient_check(Geometry::Hyperbolic, 0.8, PI / 4.0).unwrap();
        assert!((l - 0.8f64.cosh()).abs() < 1e-12 && (r - 0.8f64.cosh()).abs() < 1e-12);
    }

    #[test]
    fn spec_resolution() {
        let spec: CurveSpec =
            serde_json::from_str(r#"{"c0":1,"harmonics":[{"k":4,"amp":0.1}],"alpha":"auto-k4"}"#).unwrap();
        assert!((spec.alpha().unwrap().unwrap() - alpha4()).abs() < 1e-12);
        assert!(spec.max_residual(4096).unwrap() < 1e-12);
        let s2: CurveSpec = serde_json::from_str(
            r#"{"geometry":"S2","R":1.0471975511965976,"epsilon":0.01,"g":[{"k":4,"amp":1}],"alpha":"auto-k4"}"#,
        )
        .unwrap();
        let a = s2.alpha().unwrap().unwrap();
        assert!((a - (5f64.sqrt() / 2.0).atan()).abs() < 1e-12);
        assert!(matches!(s2.build().unwrap(), BuiltCurve::Deformed(_)));
        let flat = CurveSpec {
            epsilon: 0.0,
            ..s2.clone()
        };
        assert!(matches!(flat.build().unwrap(), BuiltCurve::Circle(_)));
        let bad: CurveSpec = serde_json::from_str(r#"{"c0":1,"alpha":"auto-k3"}"#).unwrap();
        assert!(matches!(bad.alpha(), Err(Error::InvalidSpec(_))));
    }
}
