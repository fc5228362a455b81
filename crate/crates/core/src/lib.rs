//! Numerical machinery for Hermite-Hadamard type inequalities of Schur convex
//! functions.
//!
//! The crate is organized bottom-up:
//!
//! * [`simplex`] volumes, uniform samplers and integration over the standard simplex
//!   (solid and probability-face readings),
//! * [`circulant`] circulant matrices stored by their generator row,
//! * [`closed_forms`] exact rational values of the simplex integrals and the
//!   contraction factor,
//! * [`korovkin`] Monte Carlo realization of the averaged operator sequence,
//! * [`certify`] grid certification of convexity, quasi-convexity and strong convexity,
//! * [`expr`] the expression language used to describe test functions.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); ring-only code such as
//! circulant multiplication also accepts [`Rational`]. The aliases below fix the
//! scalar for the common case.

pub mod certify;
pub mod circulant;
pub mod closed_forms;
pub mod error;
pub mod expr;
pub mod korovkin;
pub mod parallel;
pub mod quadrature;
pub mod scalar;
pub mod simplex;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Real;

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

pub type Generator = circulant::CirculantGenerator<f64>;
pub type ExactGenerator = circulant::CirculantGenerator<Rational>;
pub type Point = simplex::SimplexPoint<f64>;
pub type Estimate = korovkin::OperatorEstimate<f64>;
pub type Decay = korovkin::DecaySeries<f64>;
pub type Report = certify::CertificateReport<f64>;
pub type Integral = simplex::Integral<f64>;
