//! Spectral toolkit for incompressible flow on the torus with analytic
//! (Gevrey-class) initial data.
//!
//! The crate is organized around a truncated Fourier lattice:
//!
//! * [`lattice`], [`field`] — mode indexing and Hermitian-symmetric
//!   coefficient storage for velocity and pressure fields;
//! * [`norms`] — ℓ², Sobolev, and Gevrey coefficient norms;
//! * [`transform`], [`advection`] — de-aliased pseudo-spectral evaluation
//!   of `(u·∇)v`, with an exact-convolution reference path;
//! * [`exact`] — closed-form viscous flows (Taylor–Green, ABC) for
//!   end-to-end validation.
//!
//! Numerical kernels are generic over the scalar type through
//! [`scalar::Real`]; the aliases below fix `f64` for ordinary use.

pub mod advection;
pub mod basis;
pub mod certify;
pub mod constants;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod field;
pub mod io;
pub mod lattice;
pub mod norms;
pub mod pressure;
pub mod radius;
pub mod rand_field;
pub mod scalar;
pub mod solver;
pub mod transform;

pub use error::Error;
pub use scalar::Real;

/// Velocity field over `f64` coefficients.
pub type Field64 = field::SpectralVectorField<f64>;
/// Velocity field over `f32` coefficients.
pub type Field32 = field::SpectralVectorField<f32>;
/// Scalar (pressure) field over `f64` coefficients.
pub type ScalarField64 = field::SpectralScalarField<f64>;
/// Radius schedule over `f64`.
pub type Schedule64 = radius::RadiusSchedule<f64>;
/// Trajectory record over `f64`.
pub type Trajectory64 = solver::TrajectoryRecord<f64>;

pub type Result<T, E = Error> = std::result::Result<T, E>;
