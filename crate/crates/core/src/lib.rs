//! Analysis of complex-valued quadratic forms on phase space and of the
//! differential operators they generate under Weyl quantization.
//!
//! The crate has three layers:
//!
//! * exact symplectic algebra: quadratic forms, Hamilton maps, Poisson
//!   brackets, ellipticity certificates and numerical-range sectors;
//! * spectral structure: Hamilton-map eigenvalues, the symplectic normal
//!   form of the real part, real-eigenvalue splitting, the exact operator
//!   spectrum lattice and its decay rate;
//! * numerics on Hermite truncations: matrix realizations of the operator,
//!   semigroup norm profiles, resolvent/pseudospectrum sweeps and the
//!   contour-integral representation of the semigroup.
//!
//! Everything is generic over the real scalar via [`scalar::Real`]
//! (`f32` or `f64`); the aliases below pin the common double-precision
//! instantiation.

pub mod catalog;
pub mod contour;
pub mod error;
pub mod form;
pub mod hamilton;
pub mod linalg;
pub mod matio;
pub mod normal_form;
pub mod order;
pub mod resolvent;
pub mod scalar;
pub mod sector;
pub mod semigroup;
pub mod spectral;
pub mod split;
pub mod tol;
pub mod weyl;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Single-precision complex scalar.
pub type C32 = num_complex::Complex<f32>;
/// Double-precision quadratic form.
pub type Form64 = form::ComplexQuadraticForm<f64>;
/// Single-precision quadratic form.
pub type Form32 = form::ComplexQuadraticForm<f32>;
