//! The standard symplectic form on R^{2n}, Hamilton maps of quadratic
//! forms, and Poisson brackets.
//!
//! Conventions: sigma((x,xi),(y,eta)) = xi·y − x·eta, with matrix
//! J = [[0, I_n], [−I_n, 0]]; the Hamilton map of q is F = J·Q and satisfies
//! the polar identity X^T Q Y = sigma(X, F Y).

use crate::error::{Error, Result};
use crate::form::ComplexQuadraticForm;
use crate::scalar::Real;
use ndarray::prelude::*;
use ndarray_linalg::Scalar;

/// The matrix J = [[0, I_n], [−I_n, 0]] over the real scalar.
pub fn j_real<T: Real>(n: usize) -> Array2<T> {
    let mut j = Array2::zeros((2 * n, 2 * n));
    for i in 0..n {
        j[[i, n + i]] = T::one();
        j[[n + i, i]] = -T::one();
    }
    j
}

/// The matrix J over the complex scalar.
pub fn j_complex<T: Real>(n: usize) -> Array2<T::C> {
    j_real::<T>(n).mapv(|v| T::c(v, T::zero()))
}

/// Symplectic product of real vectors: sigma(u, v) = xi_u·x_v − x_u·xi_v.
pub fn sigma<T: Real>(u: &ArrayView1<T>, v: &ArrayView1<T>) -> T {
    let n = u.len() / 2;
    debug_assert_eq!(u.len(), v.len());
    let mut acc = T::zero();
    for j in 0..n {
        acc += u[n + j] * v[j] - u[j] * v[n + j];
    }
    acc
}

/// Symplectic product extended bilinearly to complex vectors.
pub fn sigma_c<T: Real>(u: &ArrayView1<T::C>, v: &ArrayView1<T::C>) -> T::C {
    let n = u.len() / 2;
    debug_assert_eq!(u.len(), v.len());
    let mut acc = T::c(T::zero(), T::zero());
    for j in 0..n {
        acc += u[n + j] * v[j] - u[j] * v[n + j];
    }
    acc
}

/// The Hamilton map F = J·Q of a quadratic form, sigma-skew-symmetric:
/// sigma(FX, Y) = −sigma(X, FY).
#[derive(Debug, Clone)]
pub struct HamiltonMap<T: Real> {
    n: usize,
    f: Array2<T::C>,
}

impl<T: Real> HamiltonMap<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Array2<T::C> {
        &self.f
    }

    /// Real part Re F = J·Re Q.
    pub fn re(&self) -> Array2<T> {
        self.f.mapv(|z| z.re())
    }

    /// Imaginary part Im F = J·Im Q.
    pub fn im(&self) -> Array2<T> {
        self.f.mapv(|z| z.im())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        crate::form::frob(&self.f)
    }
}

/// Hamilton map of a form: F = J·Q.
pub fn hamilton_map<T: Real>(form: &ComplexQuadraticForm<T>) -> HamiltonMap<T> {
    let n = form.n();
    // J·Q without a general matmul: J swaps and negates block rows
    let q = form.matrix();
    let d = 2 * n;
    let mut f = Array2::from_elem((d, d), T::c(T::zero(), T::zero()));
    for i in 0..n {
        for j in 0..d {
            f[[i, j]] = q[[n + i, j]];
            f[[n + i, j]] = -q[[i, j]];
        }
    }
    HamiltonMap { n, f }
}

/// Poisson bracket {f1, f2} = d_xi f1 · d_x f2 − d_x f1 · d_xi f2 of two
/// quadratic forms, itself quadratic: its Hamilton map is −2[F_1, F_2] and
/// its coefficient matrix is −2(Q_1 J Q_2 − Q_2 J Q_1), exactly symmetric.
pub fn poisson_bracket<T: Real>(
    f1: &ComplexQuadraticForm<T>,
    f2: &ComplexQuadraticForm<T>,
) -> Result<ComplexQuadraticForm<T>> {
    if f1.n() != f2.n() {
        return Err(Error::Dimension(format!(
            "bracket operands have n = {} and n = {}",
            f1.n(),
            f2.n()
        )));
    }
    let j = j_complex::<T>(f1.n());
    let a = f1.matrix().dot(&j).dot(f2.matrix());
    let b = f2.matrix().dot(&j).dot(f1.matrix());
    let q = (a - b).mapv(|z| z * T::cl(-2.0, 0.0));
    ComplexQuadraticForm::resymmetrized(f1.n(), q)
}
