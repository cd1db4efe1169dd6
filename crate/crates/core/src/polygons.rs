//! Gutkin polygons: convex `n`-gons whose `k`-diagonals `v_i v_{i+k}` meet
//! the sides `v_i v_{i+1}` and `v_{i+k-1} v_{i+k}` at one common angle `α`.
//!
//! Every Gutkin `(n, k)`-gon has `α = π(k-1)/n`. Equiangular ones with
//! side lengths `x_i` (side `i` in direction `ω^i`, `ω = exp(2πi/n)`) are
//! exactly the positive solutions of `S x = 0`, where `S` is the real
//! circulant with first row `2 sin(2π(j-m)/n)` for `j < k` and zero after,
//! `m = (k-1)/2`. The matrix of the complex condition is `A = iS`; its
//! eigenvalues are the `λ_r` of [`circulant_spectrum`], with Fourier modes
//! as eigenvectors.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GutkinPolygon {
    pub n: usize,
    pub k: usize,
    pub vertices: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl GutkinPolygon {
    pub fn new(k: usize, vertices: Vec<Point>) -> Self {
        let n = vertices.len();
        let alpha = contact_angle_any(n, k).ok();
        Self { n, k, vertices, alpha }
    }

    pub fn side_lengths(&self) -> Vec<f64> {
        side_lengths(&self.vertices)
    }

    pub fn interior_angles(&self) -> Vec<f64> {
        interior_angles(&self.vertices)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_diagonal_range(n: usize, k: usize) -> Result<()> {
    if k >= 2 && 2 * k <= n {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("need 2 <= k <= n/2, got n = {n}, k = {k}")))
    }
}

/// Polygon-level operations also accept `n/2 < k < n`, where the
/// `k`-diagonal `v_i v_{i+k}` is the `(n-k)`-diagonal seen from its other
/// end (`k = n-1` is a side, as for the inscribed rectangle).
fn check_polygon_range(n: usize, k: usize) -> Result<()> {
    if n >= 3 && k >= 2 && k < n {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "need n >= 3 and 2 <= k < n, got n = {n}, k = {k}"
        )))
    }
}

/// `π(k-1)/n` for `2 <= k <= n/2`.
pub fn contact_angle(n: usize, k: usize) -> Result<f64> {
    check_diagonal_range(n, k)?;
    Ok(PI * (k - 1) as f64 / n as f64)
}

fn contact_angle_any(n: usize, k: usize) -> Result<f64> {
    check_polygon_range(n, k)?;
    Ok(PI * (k - 1) as f64 / n as f64)
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Unsigned angle between two plane vectors.
fn angle(a: Point, b: Point) -> f64 {
    cross(a, b).abs().atan2(dot(a, b))
}

/// `∠ a o b`.
fn angle_at(o: Point, a: Point, b: Point) -> f64 {
    angle(sub(a, o), sub(b, o))
}

pub fn side_lengths(v: &[Point]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let d = sub(v[(i + 1) % n], v[i]);
            d[0].hypot(d[1])
        })
        .collect()
}

pub fn interior_angles(v: &[Point]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| angle_at(v[i], v[(i + 1) % n], v[(i + n - 1) % n]))
        .collect()
}

/// Errors unless `v` is a strictly convex counterclockwise polygon.
pub fn check_convex_ccw(v: &[Point]) -> Result<()> {
    let n = v.len();
    if n < 3 {
        return Err(Error::OutOfRange(format!("a polygon needs 3 vertices, got {n}")));
    }
    let scale = v
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = 1e-14 * scale * scale;
    let mut turning = 0.0;
    let (mut pos, mut neg) = (0, 0);
    for i in 0..n {
        let e0 = sub(v[(i + 1) % n], v[i]);
        let e1 = sub(v[(i + 2) % n], v[(i + 1) % n]);
        let c = cross(e0, e1);
        if c > eps {
            pos += 1;
        } else if c < -eps {
            neg += 1;
        }
        turning += c.atan2(dot(e0, e1));
    }
    if neg == n && (turning + TAU).abs() < 1e-6 {
        return Err(Error::WrongOrientation);
    }
    if pos != n || (turning - TAU).abs() > 1e-6 {
        return Err(Error::NotConvex);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GutkinVerification {
    pub is_gutkin: bool,
    /// Mean of the `2n` measured contact angles.
    pub alpha: f64,
    /// Largest deviation of a contact angle from the mean.
    pub max_residual: f64,
    /// `β_i = ∠ v_{i-k} v_i v_{i+k}`, absent when `n = 2k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_angles: Option<Vec<f64>>,
}

/// Measures `∠v_{i+1} v_i v_{i+k}` and `∠v_{i+k-1} v_{i+k} v_i` for all `i`.
pub fn verify_gutkin(v: &[Point], k: usize, tol: f64) -> Result<GutkinVerification> {
    let n = v.len();
    check_polygon_range(n, k)?;
    check_convex_ccw(v)?;
    let at = |i: usize| v[i % n];
    let mut angles = Vec::with_capacity(2 * n);
    for i in 0..n {
        angles.push(angle_at(at(i), at(i + 1), at(i + k)));
        angles.push(angle_at(at(i + k), at(i + k - 1), at(i)));
    }
    let alpha = angles.iter().sum::<f64>() / angles.len() as f64;
    let max_residual = angles.iter().map(|a| (a - alpha).abs()).fold(0.0, f64::max);
    let beta_angles = (n != 2 * k).then(|| (0..n).map(|i| angle_at(at(i), at(i + n - k), at(i + k))).collect());
    Ok(GutkinVerification {
        is_gutkin: max_residual < tol,
        alpha,
        max_residual,
        beta_angles,
    })
}

/// `|α - (π(n-2) - Σβ_i)/(2n)|`, with the interior angle at `v_i` split as
/// `α + β_i + α` by the two diagonals through it.
pub fn beta_sum_check(p: &GutkinPolygon) -> Result<f64> {
    if p.n == 2 * p.k {
        return Err(Error::NotApplicable("no β angles when n = 2k".into()));
    }
    let report = verify_gutkin(&p.vertices, p.k, DEFAULT_TOL)?;
    let betas = report.beta_angles.expect("n != 2k");
    let n = p.n as f64;
    let predicted = (PI * (n - 2.0) - betas.iter().sum::<f64>()) / (2.0 * n);
    Ok((p.alpha.unwrap_or(report.alpha) - predicted).abs())
}

/// Interior angle at `v_i` equals that at `v_{i+k-1}` for every `i`.
pub fn angle_periodicity_check(p: &GutkinPolygon) -> bool {
    let a = p.interior_angles();
    let n = a.len();
    (0..n).all(|i| (a[i] - a[(i + p.k - 1) % n]).abs() < 1e-9)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CirculantSpectrum {
    pub n: usize,
    pub k: usize,
    pub eigenvalues: Vec<Complex64>,
    pub zero_set: Vec<usize>,
    #[serde(rename = "M")]
    pub m: usize,
    /// Largest gap between direct summation and the FFT route, relative to
    /// the largest first-row coefficient.
    pub fft_discrepancy: f64,
}

/// `2 sin(2π(j-m)/n)`, the first-row entries of `S` for `j < k`.
pub fn circulant_row(n: usize, k: usize) -> Vec<f64> {
    let m = (k as f64 - 1.0) / 2.0;
    (0..n)
        .map(|j| {
            if j < k {
                2.0 * (TAU * (j as f64 - m) / n as f64).sin()
            } else {
                0.0
            }
        })
        .collect()
}

/// `λ_r = Σ_{ν<k} (ω^{ν-m} - ω^{m-ν}) ω^{νr}`, evaluated term by term with
/// each power taken through the exponential (`m` may be a half-integer).
pub fn circulant_spectrum(n: usize, k: usize, tol: f64) -> Result<CirculantSpectrum> {
    check_diagonal_range(n, k)?;
    let m = (k as f64 - 1.0) / 2.0;
    let w = |e: f64| Complex64::from_polar(1.0, TAU * e / n as f64);
    let eigenvalues: Vec<Complex64> = (0..n)
        .map(|r| {
            (0..k)
                .map(|nu| {
                    let nu = nu as f64;
                    (w(nu - m) - w(m - nu)) * w(nu * r as f64)
                })
                .sum()
        })
        .collect();

    // Same eigenvalues as the unnormalized inverse DFT of i·(first row).
    let row = circulant_row(n, k);
    let mut buf: Vec<Complex64> = row.iter().map(|&c| Complex64::new(0.0, c)).collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = row.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let fft_discrepancy = eigenvalues
        .iter()
        .zip(&buf)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale;

    let zero_set: Vec<usize> = (0..n).filter(|&r| eigenvalues[r].norm() / scale < tol).collect();
    let m_count = zero_set.iter().filter(|&&r| r >= 2 && r + 2 <= n).count();
    Ok(CirculantSpectrum {
        n,
        k,
        eigenvalues,
        zero_set,
        m: m_count,
        fft_discrepancy,
    })
}

/// The real circulant `S` with `S[i][(i+j) mod n] = row[j]`.
pub fn circulant_matrix(n: usize, k: usize) -> DMatrix<f64> {
    let row = circulant_row(n, k);
    DMatrix::from_fn(n, n, |i, j| row[(j + n - i) % n])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyBasis {
    pub n: usize,
    pub k: usize,
    /// Orthonormal kernel vectors of `S`, orthogonal to the all-ones vector.
    pub basis: Vec<Vec<f64>>,
}

/// Kernel of `S` modulo the regular polygon, from the SVD of `S`.
pub fn equiangular_family_basis(n: usize, k: usize) -> Result<FamilyBasis> {
    check_diagonal_range(n, k)?;
    let s = circulant_matrix(n, k);
    let scale = circulant_row(n, k).iter().map(|c| c.abs()).fold(0.0, f64::max);
    let svd = s.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma >= DEFAULT_TOL * scale {
            continue;
        }
        let mut b: Vec<f64> = v_t.row(i).iter().copied().collect();
        let mean = b.iter().sum::<f64>() / n as f64;
        b.iter_mut().for_each(|x| *x -= mean);
        for q in &basis {
            let d: f64 = b.iter().zip(q).map(|(x, y)| x * y).sum();
            b.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
        }
        let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            b.iter_mut().for_each(|x| *x /= norm);
            basis.push(b);
        }
    }
    Ok(FamilyBasis { n, k, basis })
}

/// Vertices `v_0 = 0`, `v_{i+1} = v_i + x_i ω^i`.
pub fn polygon_from_sides(x: &[f64]) -> Vec<Point> {
    let n = x.len();
    let mut v = Vec::with_capacity(n);
    let mut p = [0.0, 0.0];
    for (i, xi) in x.iter().enumerate() {
        v.push(p);
        let (s, c) = (TAU * i as f64 / n as f64).sin_cos();
        p = [p[0] + xi * c, p[1] + xi * s];
    }
    v
}

/// Side lengths `1 + s b` for the kernel direction `b = Σ coeffs_j basis_j`,
/// with `s` chosen so the shortest side is `0.1` of the mean.
pub fn family_member(basis: &FamilyBasis, coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.len() != basis.basis.len() {
        return Err(Error::InvalidSpec(format!(
            "expected {} coefficients, got {}",
            basis.basis.len(),
            coeffs.len()
        )));
    }
    let mut b = vec![0.0; basis.n];
    for (c, q) in coeffs.iter().zip(&basis.basis) {
        b.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
    }
    let lowest = b.iter().copied().fold(f64::INFINITY, f64::min);
    if lowest >= -1e-12 {
        return Ok(vec![1.0; basis.n]);
    }
    let s = 0.9 / -lowest;
    Ok(b.iter().map(|x| 1.0 + s * x).collect())
}

/// A family member in a direction drawn from `seed`.
pub fn sample_family_member(basis: &FamilyBasis, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = basis.basis.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    family_member(basis, &coeffs)
}

/// The `2k`-gon with unit `k`-diagonals and first sides `x_0..x_{k-3}` =
/// `free`. The last two `x` solve `Σ x_i (cos iθ, sin iθ) = (cos α, sin α)`
/// with `θ = π/k`; the opposite sides are `y_i = 2 cos α - x_i`.
pub fn construct_2kk(k: usize, free: &[f64]) -> Result<GutkinPolygon> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("k = {k} must be at least 2")));
    }
    if free.len() != k - 2 {
        return Err(Error::InvalidSpec(format!(
            "expected {} free parameters, got {}",
            k - 2,
            free.len()
        )));
    }
    let theta = PI / k as f64;
    let alpha = PI * (k - 1) as f64 / (2 * k) as f64;
    let (mut rx, mut ry) = alpha.sin_cos();
    std::mem::swap(&mut rx, &mut ry);
    for (i, xi) in free.iter().enumerate() {
        let (s, c) = (theta * i as f64).sin_cos();
        rx -= xi * c;
        ry -= xi * s;
    }
    let (s1, c1) = (theta * (k - 2) as f64).sin_cos();
    let (s2, c2) = (theta * (k - 1) as f64).sin_cos();
    let det = c1 * s2 - c2 * s1;
    let mut x = free.to_vec();
    x.push((rx * s2 - ry * c2) / det);
    x.push((c1 * ry - s1 * rx) / det);
    let y: Vec<f64> = x.iter().map(|xi| 2.0 * alpha.cos() - xi).collect();
    let sides: Vec<f64> = x.iter().chain(&y).copied().collect();
    let lowest = sides.iter().copied().fold(f64::INFINITY, f64::min);
    if lowest <= 0.0 {
        return Err(Error::Infeasible(lowest));
    }
    Ok(GutkinPolygon {
        n: 2 * k,
        k,
        vertices: polygon_from_sides(&sides),
        alpha: Some(alpha),
    })
}

/// Slack allowed in the arc sum of [`construct_inscribed`].
pub const ARC_SUM_TOL: f64 = 1e-9;

/// Vertices on the unit circle cut by the arcs `θ_1..θ_p` repeated `q`
/// times, `p = gcd(n, k-1)`, `q = n/p`. Since `p | k-1`, each chord
/// `v_i v_{i+k}` and the side `v_i v_{i+1}` cut off `(k-1)/p` whole
/// patterns, so every contact angle is the inscribed angle `π(k-1)/n`.
pub fn construct_inscribed(n: usize, k: usize, arcs: &[f64]) -> Result<GutkinPolygon> {
    check_polygon_range(n, k)?;
    let p = gcd(n, k - 1);
    if p == 1 {
        return Err(Error::CoprimePair { n, km1: k - 1 });
    }
    if arcs.len() != p {
        return Err(Error::InvalidSpec(format!("expected {p} arcs, got {}", arcs.len())));
    }
    if let Some(&bad) = arcs.iter().find(|&&a| a.is_nan() || a <= 0.0) {
        return Err(Error::NonPositiveArc(bad));
    }
    let expected = TAU * p as f64 / n as f64;
    let got: f64 = arcs.iter().sum();
    if (got - expected).abs() > ARC_SUM_TOL {
        return Err(Error::ArcSumMismatch { got, expected });
    }
    // Rescale so arcs typed to ten digits still close up exactly.
    let scale = expected / got;
    let mut phi = 0.0f64;
    let vertices = (0..n)
        .map(|i| {
            let (s, c) = phi.sin_cos();
            phi += arcs[i % p] * scale;
            [c, s]
        })
        .collect();
    Ok(GutkinPolygon {
        n,
        k,
        vertices,
        alpha: Some(PI * (k - 1) as f64 / n as f64),
    })
}

/// Arcs `(2π/q)·w/Σw` with weights `(0.4, 0.6, 1, 1, ...)`: a fixed
/// non-uniform choice for sweeps.
pub fn default_nonuniform_arcs(n: usize, k: usize) -> Vec<f64> {
    let p = gcd(n, k - 1);
    let w: Vec<f64> = (0..p).map(|j| [0.4, 0.6].get(j).copied().unwrap_or(1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| TAU * p as f64 / n as f64 * x / total).collect()
}

/// Non-regular Gutkin `(n, k)`-gons exist iff `gcd(n, k-1) > 1`, for
/// `k < n/2`. At `n = 2k` the family has dimension `k - 2` whatever the
/// gcd, so for even `k ≥ 4` (where `gcd(2k, k-1) = 1`) they exist anyway.
pub fn exists_nontrivial(n: usize, k: usize) -> Result<bool> {
    check_diagonal_range(n, k)?;
    Ok(gcd(n, k - 1) > 1 || (n == 2 * k && k >= 3))
}

/// Moves `v_0` to the origin and `v_1` onto the positive `x` axis, then
/// scales to unit `k`-diagonal when `n = 2k`, otherwise to unit perimeter.
pub fn normalize_similarity(p: &GutkinPolygon) -> GutkinPolygon {
    let v0 = p.vertices[0];
    let d = sub(p.vertices[1], v0);
    let rot = d[1].atan2(d[0]);
    let (s, c) = (-rot).sin_cos();
    let moved: Vec<Point> = p
        .vertices
        .iter()
        .map(|q| {
            let r = sub(*q, v0);
            [c * r[0] - s * r[1], s * r[0] + c * r[1]]
        })
        .collect();
    let size = if p.n == 2 * p.k {
        let h = moved[p.k];
        h[0].hypot(h[1])
    } else {
        side_lengths(&moved).iter().sum()
    };
    GutkinPolygon {
        n: p.n,
        k: p.k,
        vertices: moved.iter().map(|q| [q[0] / size, q[1] / size]).collect(),
        alpha: p.alpha,
    }
}

/// The regular `n`-gon inscribed in the unit circle.
pub fn regular_polygon(n: usize) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let (s, c) = (TAU * i as f64 / n as f64).sin_cos();
            [c, s]
        })
        .collect()
}

/// Relative spread of the side lengths; zero for equilateral polygons.
pub fn side_length_variance(v: &[Point]) -> f64 {
    let l = side_lengths(v);
    let mean = l.iter().sum::<f64>() / l.len() as f64;
    l.iter().map(|x| (x / mean - 1.0).powi(2)).sum::<f64>() / l.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::{connelly_check, solve_restr2};

    #[test]
    fn contact_angles() {
        assert!((contact_angle(6, 2).unwrap() - PI / 6.0).abs() < 1e-15);
        assert!((contact_angle(12, 4).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!(matches!(contact_angle(4, 3), Err(Error::OutOfRange(_))));
        assert!(matches!(contact_angle(5, 1), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn verification_examples() {
        let r = verify_gutkin(&regular_polygon(5), 2, DEFAULT_TOL).unwrap();
        assert!(r.is_gutkin && (r.alpha - PI / 5.0).abs() < 1e-12);
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let r = verify_gutkin(&sq, 2, DEFAULT_TOL).unwrap();
        assert!(r.is_gutkin && (r.alpha - PI / 4.0).abs() < 1e-12);
        let rect = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]];
        assert!(!verify_gutkin(&rect, 2, DEFAULT_TOL).unwrap().is_gutkin);
        let mut cw = sq.to_vec();
        cw.reverse();
        assert_eq!(verify_gutkin(&cw, 2, DEFAULT_TOL).unwrap_err(), Error::WrongOrientation);
        let dart = [[0.0, 0.0], [2.0, 0.0], [0.5, 0.5], [0.0, 2.0]];
        assert_eq!(verify_gutkin(&dart, 2, DEFAULT_TOL).unwrap_err(), Error::NotConvex);
    }

    #[test]
    fn beta_sums() {
        let hex = GutkinPolygon::new(2, regular_polygon(6));
        assert!(beta_sum_check(&hex).unwrap() < 1e-12);
        let dodeca = GutkinPolygon::new(4, regular_polygon(12));
        assert!(beta_sum_check(&dodeca).unwrap() < 1e-12);
        let p = construct_inscribed(12, 4, &default_nonuniform_arcs(12, 4)).unwrap();
        assert!(beta_sum_check(&p).unwrap() < 1e-10);
        let sq = GutkinPolygon::new(2, regular_polygon(4));
        assert!(matches!(beta_sum_check(&sq), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn spectrum_of_six_three() {
        let s = circulant_spectrum(6, 3, DEFAULT_TOL).unwrap();
        assert_eq!(s.zero_set, vec![0, 3]);
        assert_eq!(s.m, 1);
        let w = |r: usize| Complex64::from_polar(1.0, TAU * r as f64 / 6.0);
        for r in 0..6 {
            let hand = Complex64::new(0.0, 3f64.sqrt()) * (w(2 * r) - 1.0);
            assert!((s.eigenvalues[r] - hand).norm() < 1e-12);
        }
        assert!(s.fft_discrepancy < 1e-12);
    }

    #[test]
    fn spectrum_examples() {
        let s = circulant_spectrum(5, 2, DEFAULT_TOL).unwrap();
        assert_eq!((s.zero_set.clone(), s.m), (vec![0], 0));
        let s = circulant_spectrum(24, 5, DEFAULT_TOL).unwrap();
        assert_eq!(s.zero_set, vec![0, 7, 12, 17]);
        assert_eq!(s.m, 3);
    }

    #[test]
    fn spectrum_agrees_with_diophantine_and_connelly() {
        for n in 5..=24 {
            for k in 2..=n / 2 {
                let s = circulant_spectrum(n, k, DEFAULT_TOL).unwrap();
                assert!(s.eigenvalues[0].norm() < 1e-12);
                assert!(s.eigenvalues[1].norm() > 1e-9 && s.eigenvalues[n - 1].norm() > 1e-9);
                let restr: Vec<usize> = solve_restr2(n, k).unwrap().iter().map(|d| d.r).collect();
                let nonzero: Vec<usize> = s.zero_set.iter().copied().filter(|&r| r != 0).collect();
                assert_eq!(nonzero, restr, "({n}, {k})");
                if 2 * k < n {
                    for r in 2..n.div_ceil(2) {
                        let below = 2 * r < n;
                        if below {
                            assert_eq!(
                                s.zero_set.contains(&r),
                                connelly_check(n, k, r).unwrap(),
                                "({n},{k},{r})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn family_basis_dimensions() {
        let b = equiangular_family_basis(6, 3).unwrap();
        assert_eq!(b.basis.len(), 1);
        let alt = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let d: f64 = b.basis[0].iter().zip(alt).map(|(x, y)| x * y).sum::<f64>().abs();
        assert!((d - 6f64.sqrt()).abs() < 1e-12);
        assert!(equiangular_family_basis(5, 2).unwrap().basis.is_empty());
        for k in 3..=5 {
            assert_eq!(equiangular_family_basis(2 * k, k).unwrap().basis.len(), k - 2);
        }
        let b = equiangular_family_basis(24, 5).unwrap();
        assert_eq!(b.basis.len(), 3);
        let x = sample_family_member(&b, 0).unwrap();
        let min = x.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((min - 0.1).abs() < 1e-12);
        let r = verify_gutkin(&polygon_from_sides(&x), 5, DEFAULT_TOL).unwrap();
        assert!(r.is_gutkin && (r.alpha - PI / 6.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn two_k_k_family() {
        let hex = construct_2kk(3, &[0.5]).unwrap();
        for l in hex.side_lengths() {
            assert!((l - 0.5).abs() < 1e-12);
        }
        let p = construct_2kk(3, &[0.3]).unwrap();
        let expect = [0.3, 0.7, 0.3, 0.7, 0.3, 0.7];
        for (l, e) in p.side_lengths().iter().zip(expect) {
            assert!((l - e).abs() < 1e-12);
        }
        for a in p.interior_angles() {
            assert!((a - TAU / 3.0).abs() < 1e-12);
        }
        assert!(matches!(construct_2kk(3, &[1.2]), Err(Error::Infeasible(_))));
        for (k, free) in [(4, vec![0.3, 0.5]), (5, vec![0.2, 0.4, 0.3])] {
            let p = construct_2kk(k, &free).unwrap();
            for i in 0..2 * k {
                let d = sub(p.vertices[(i + k) % (2 * k)], p.vertices[i]);
                assert!((d[0].hypot(d[1]) - 1.0).abs() < 1e-10);
            }
            let r = verify_gutkin(&p.vertices, k, DEFAULT_TOL).unwrap();
            assert!(r.is_gutkin && (r.alpha - p.alpha.unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn inscribed_constructions() {
        let rect = construct_inscribed(4, 3, &[PI / 3.0, 2.0 * PI / 3.0]).unwrap();
        let r = verify_gutkin(&rect.vertices, 3, DEFAULT_TOL).unwrap();
        assert!(r.is_gutkin && (r.alpha - PI / 2.0).abs() < 1e-12);
        let hex = construct_inscribed(6, 3, &[0.8, TAU / 3.0 - 0.8]).unwrap();
        let r = verify_gutkin(&hex.vertices, 3, DEFAULT_TOL).unwrap();
        assert!(r.is_gutkin && (r.alpha - PI / 3.0).abs() < 1e-12);
        assert!(side_length_variance(&hex.vertices) > 1e-6);
        assert!(angle_periodicity_check(
            &construct_inscribed(6, 3, &[1.0, TAU / 3.0 - 1.0]).unwrap()
        ));
        // The arcs must fill 2π/q = 2π/3 here, not π.
        assert!(matches!(
            construct_inscribed(6, 3, &[0.8, PI - 0.8]),
            Err(Error::ArcSumMismatch { .. })
        ));
        assert_eq!(
            construct_inscribed(7, 3, &[1.0]).unwrap_err(),
            Error::CoprimePair { n: 7, km1: 2 }
        );
        assert!(matches!(
            construct_inscribed(6, 3, &[-0.1, TAU / 3.0 + 0.1]),
            Err(Error::NonPositiveArc(_))
        ));
        let even = construct_inscribed(12, 4, &[TAU / 12.0; 3]).unwrap();
        assert!(side_length_variance(&even.vertices) < 1e-24);
    }

    #[test]
    fn nontrivial_existence() {
        assert!(!exists_nontrivial(7, 3).unwrap());
        assert!(exists_nontrivial(6, 3).unwrap());
        assert!(exists_nontrivial(12, 4).unwrap());
        assert!(!exists_nontrivial(9, 2).unwrap());
        // gcd(8, 3) = 1, yet the (8, 4) family is two-dimensional.
        assert!(exists_nontrivial(8, 4).unwrap());
        let sides = sample_family_member(&equiangular_family_basis(8, 4).unwrap(), 1).unwrap();
        assert!(side_length_variance(&polygon_from_sides(&sides)) > 1e-6);
        assert!(!exists_nontrivial(4, 2).unwrap());
    }

    #[test]
    fn normalization() {
        let p = normalize_similarity(&construct_2kk(3, &[0.3]).unwrap());
        assert_eq!(normalize_similarity(&p), p);
        let rot = 0.7f64;
        let (s, c) = rot.sin_cos();
        let moved = GutkinPolygon {
            vertices: p
                .vertices
                .iter()
                .map(|q| [3.0 + 2.0 * (c * q[0] - s * q[1]), -1.0 + 2.0 * (s * q[0] + c * q[1])])
                .collect(),
            ..p.clone()
        };
        let back = normalize_similarity(&moved);
        for (a, b) in back.vertices.iter().zip(&p.vertices) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
        for i in 0..6 {
            let d = sub(back.vertices[(i + 3) % 6], back.vertices[i]);
            assert!((d[0].hypot(d[1]) - 1.0).abs() < 1e-12);
        }
    }
}
