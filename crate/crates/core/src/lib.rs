//! Graded special Lagrangian curves on the flat 2-torus.
//!
//! The crate covers the torus geometry and graded homology classes, discrete
//! curves with their phase data, semi-implicit curve-shortening flow, graded
//! connect sums, phase stability, twist monodromy and the slope calculus of
//! bundles on the mirror elliptic curve.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.

mod crossing;
pub mod curvature_flow;
pub mod curves;
pub mod error;
pub mod mirror;
pub mod monodromy;
pub mod scalar;
pub mod shapes;
pub mod stability;
pub mod surgery;
pub mod torus_cy;
pub mod vec2;

pub use num_complex::Complex;

pub use curves::{flux, swept_area, theta_lift_compute, CurveJson, DiscreteCurve};
pub use error::{Error, Result};
pub use scalar::Real;
pub use torus_cy::{omega_integral, phase_and_slope, shift_grading, GradedClass, Slope, TorusCY};
pub use vec2::Vec2;

pub type Torus = TorusCY<f64>;
pub type Class = GradedClass<f64>;
pub type Curve = DiscreteCurve<f64>;
pub type Point = Vec2<f64>;
