//! Curves and polygons whose chords meet the boundary at one common angle
//! at both ends, in the Euclidean plane, on the sphere and in the
//! hyperbolic plane.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: points, tangents, geodesics, distances, geodesic curvature
//!   and geodesic shooting in the three constant-curvature models.
//! - [`chords`]: the billiard generating function (chord length) and its
//!   partial derivatives.
//! - [`angles`]: root solvers for the admissibility equations.
//! - [`curves`]: Fourier-built Euclidean curves, deformed circles on the
//!   sphere and in the hyperbolic plane, and the functional-equation
//!   residual operators.
//! - [`billiards`]: the billiard ball map and invariant-circle checks.
//! - [`polygons`]: equiangular chord polygons, their circulant spectral
//!   theory and explicit constructions.
//! - [`export`]: deterministic JSON/CSV number formatting and SVG output.
//! - [`precise`]: double-double evaluation used by finite-difference checks.

pub mod angles;
pub mod billiards;
pub mod chords;
pub mod curves;
pub mod error;
pub mod export;
pub mod fourier;
pub mod geometry;
pub mod polygons;
pub mod precise;

pub use error::{Error, Result};
pub use fourier::{FourierSeries, Harmonic};
pub use geometry::{Curve, Geodesic, Geometry, SurfacePoint, TangentVector};
