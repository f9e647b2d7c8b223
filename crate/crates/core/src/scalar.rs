//! Scalar abstraction. Every algorithm in this crate is generic over the
//! real float type through [`Real`]; `f32` and `f64` are the two instances.

use ndarray_linalg::{Lapack, Scalar};
use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign, NumCast};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real scalar type the library is generic over.
///
/// The associated type [`Real::C`] is the matching complex type
/// (`Complex<Self>`), carried as an associated type so that LAPACK bounds
/// on complex matrices elaborate at use sites.
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
    + Lapack
    + Scalar<Real = Self, Complex = <Self as Real>::C>
    + ndarray::ScalarOperand
{
    /// Matching complex scalar with LAPACK support.
    type C: Lapack
        + Scalar<Real = Self, Complex = <Self as Real>::C>
        + ndarray::ScalarOperand
        + Send
        + Sync
        + Default;

    /// Complex number from real and imaginary parts.
    fn c(re: Self, im: Self) -> Self::C {
        <Self as Scalar>::complex(re, im)
    }

    /// Lossy conversion from an `f64` literal (exact for the `f64` instance).
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("literal conversion")
    }

    /// Complex number from `f64` literals.
    fn cl(re: f64, im: f64) -> Self::C {
        Self::c(Self::lit(re), Self::lit(im))
    }
}

impl Real for f32 {
    type C = Complex<f32>;
}
impl Real for f64 {
    type C = Complex<f64>;
}

/// Principal argument of a complex scalar, in (−π, π].
pub fn arg<T: Real>(z: T::C) -> T {
    z.im().atan2(z.re())
}

/// Unit complex number e^{i theta}.
///
/// `Float` and `Scalar` both define `sin`/`cos`/`sqrt` on the real type;
/// this helper (and [`rsqrt`]) keep call sites unambiguous.
pub fn dir<T: Real>(theta: T) -> T::C {
    T::c(Float::cos(theta), Float::sin(theta))
}

/// Square root of a real scalar (disambiguated).
pub fn rsqrt<T: Real>(x: T) -> T {
    Float::sqrt(x)
}

/// Absolute value of a real scalar (disambiguated).
pub fn rabs<T: Real>(x: T) -> T {
    Float::abs(x)
}

/// Wrap an angle into the principal branch (−π, π].
pub fn principal<T: Real>(theta: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut t = theta % two_pi;
    if t <= -T::PI() {
        t += two_pi;
    } else if t > T::PI() {
        t -= two_pi;
    }
    t
}
