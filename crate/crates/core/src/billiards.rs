//! The billiard ball map inside a convex curve.
//!
//! A state is a boundary parameter `t` and the angle `theta` the outgoing
//! chord makes with the forward tangent. The ball runs along the chord and
//! reflects; the reflected chord makes the arrival angle with the forward
//! tangent again, so the arrival angle is the next launch angle. With this
//! convention the invariant circle of a Gutkin curve is `{theta = α}`.
//!
//! States are boundary parameters, so long orbits do not drift off the
//! model surface.

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{shoot_to_curve, Curve};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BilliardState {
    pub t: f64,
    pub theta: f64,
}

impl BilliardState {
    pub fn new(t: f64, theta: f64) -> Self {
        Self { t, theta }
    }

    /// The state of the reversed motion through the same boundary point.
    pub fn reversed(self) -> Self {
        Self::new(self.t, std::f64::consts::PI - self.theta)
    }
}

/// One bounce, also returning the length of the chord travelled.
pub fn billiard_step_with_chord<C: Curve + ?Sized>(curve: &C, s: BilliardState) -> Result<(BilliardState, f64)> {
    let shot = shoot_to_curve(curve, s.t, s.theta)?;
    let t = shot.t1.rem_euclid(curve.period());
    Ok((BilliardState::new(t, shot.arrival_angle), shot.chord_length))
}

pub fn billiard_step<C: Curve + ?Sized>(curve: &C, s: BilliardState) -> Result<BilliardState> {
    billiard_step_with_chord(curve, s).map(|(next, _)| next)
}

/// `n_steps` states after `s0` (excluding `s0`).
pub fn orbit<C: Curve + ?Sized>(curve: &C, s0: BilliardState, n_steps: usize) -> Result<Vec<BilliardState>> {
    let mut out = Vec::with_capacity(n_steps);
    let mut s = s0;
    for _ in 0..n_steps {
        s = billiard_step(curve, s)?;
        out.push(s);
    }
    Ok(out)
}

/// Worst `|theta - α|` over `n_steps` bounces from each of `n_starts`
/// equally spaced starts at angle `α`.
pub fn invariant_circle_residual<C: Curve + ?Sized>(
    curve: &C,
    alpha: f64,
    n_steps: usize,
    n_starts: usize,
) -> Result<f64> {
    let period = curve.period();
    let mut worst = 0.0f64;
    for j in 0..n_starts {
        let start = BilliardState::new(period * j as f64 / n_starts as f64, alpha);
        for s in orbit(curve, start, n_steps)? {
            worst = worst.max((s.theta - alpha).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitRow {
    pub step: usize,
    pub t: f64,
    pub theta: f64,
    pub chord_length: f64,
}

/// The first `n_steps` states of the orbit of `s0`, each with the length
/// of the chord launched from it.
pub fn export_orbit<C: Curve + ?Sized>(curve: &C, s0: BilliardState, n_steps: usize) -> Result<Vec<OrbitRow>> {
    let mut rows = Vec::with_capacity(n_steps);
    let mut s = BilliardState::new(s0.t.rem_euclid(curve.period()), s0.theta);
    for step in 0..n_steps {
        let (next, chord_length) = billiard_step_with_chord(curve, s)?;
        rows.push(OrbitRow {
            step,
            t: s.t,
            theta: s.theta,
            chord_length,
        });
        s = next;
    }
    Ok(rows)
}
