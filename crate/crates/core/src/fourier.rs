//! Finite real Fourier series `c + Σ a_k cos(k t + φ_k)`.
//!
//! Derivatives are taken on the coefficients, never numerically.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

/// One term `amp * cos(k t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub k: u32,
    pub amp: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Harmonic {
    pub fn new(k: u32, amp: f64, phase: f64) -> Self {
        Self { k, amp, phase }
    }

    pub fn cos(k: u32, amp: f64) -> Self {
        Self::new(k, amp, 0.0)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.amp * (f64::from(self.k) * t + self.phase).cos()
    }
}

/// A 2π-periodic function stored by its Fourier coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FourierSeries {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub harmonics: Vec<Harmonic>,
}

impl FourierSeries {
    pub fn new(constant: f64, harmonics: Vec<Harmonic>) -> Self {
        Self { constant, harmonics }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(c, Vec::new())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.constant + self.harmonics.iter().map(|h| h.eval(t)).sum::<f64>()
    }

    /// Exact derivative: `d/dt a cos(kt + φ) = k a cos(kt + φ + π/2)`.
    pub fn derivative(&self) -> FourierSeries {
        let harmonics = self
            .harmonics
            .iter()
            .filter(|h| h.k > 0)
            .map(|h| Harmonic::new(h.k, h.amp * f64::from(h.k), h.phase + FRAC_PI_2))
            .collect();
        FourierSeries::new(0.0, harmonics)
    }

    /// First derivative evaluated directly, without allocating.
    pub fn eval_derivative(&self, t: f64) -> f64 {
        self.harmonics
            .iter()
            .map(|h| {
                let k = f64::from(h.k);
                -h.amp * k * (k * t + h.phase).sin()
            })
            .sum()
    }

    pub fn eval_second_derivative(&self, t: f64) -> f64 {
        self.harmonics
            .iter()
            .map(|h| {
                let k = f64::from(h.k);
                -h.amp * k * k * (k * t + h.phase).cos()
            })
            .sum()
    }

    /// Returns `self + s * other` with like harmonics left as separate terms.
    pub fn add_scaled(&self, s: f64, other: &FourierSeries) -> FourierSeries {
        let mut harmonics = self.harmonics.clone();
        harmonics.extend(other.harmonics.iter().map(|h| Harmonic::new(h.k, s * h.amp, h.phase)));
        FourierSeries::new(self.constant + s * other.constant, harmonics)
    }

    pub fn scaled(&self, s: f64) -> FourierSeries {
        FourierSeries::constant(0.0).add_scaled(s, self)
    }

    /// Upper bound on `|f'|`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.harmonics.iter().map(|h| h.amp.abs() * f64::from(h.k)).sum()
    }

    pub fn has_first_harmonic(&self) -> bool {
        self.harmonics.iter().any(|h| h.k == 1 && h.amp != 0.0)
    }

    /// Minimum over a uniform grid of `n` points, lowered by the Lipschitz
    /// margin so the result bounds the true minimum from below.
    pub fn certified_min(&self, n: usize) -> f64 {
        let h = std::f64::consts::TAU / n as f64;
        let grid_min = (0..n).map(|i| self.eval(i as f64 * h)).fold(f64::INFINITY, f64::min);
        grid_min - 0.5 * h * self.lipschitz_bound()
    }
}
