//! Dense numerical kernels shared by the truncation lab: a scaling-and-
//! squaring matrix exponential, Gauss-Legendre nodes, and singular-value
//! based norms.

use crate::error::{Error, Result};
use crate::scalar::{rabs, Real};
use ndarray::prelude::*;
use ndarray_linalg::{Inverse, SVD};
use num_traits::Float;

/// Degree 13 diagonal Pade numerator coefficients for the exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm threshold below which the degree 13 approximant is full accuracy.
const PADE13_THETA: f64 = 5.371920351148152;

fn one_norm<T: Real>(a: &Array2<T::C>) -> T {
    use ndarray_linalg::Scalar;
    let mut best = T::zero();
    for col in a.columns() {
        let s = col.iter().fold(T::zero(), |acc, v| acc + v.abs());
        if s > best {
            best = s;
        }
    }
    best
}

/// Matrix exponential by scaling and squaring with a degree 13 Pade
/// approximant.
pub fn expm<T: Real>(a: &Array2<T::C>) -> Result<Array2<T::C>> {
    let d = a.nrows();
    if d != a.ncols() {
        return Err(Error::Dimension(format!(
            "exponential of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if d == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    let theta = T::lit(PADE13_THETA);
    let norm = one_norm::<T>(a);
    let squarings = if norm > theta {
        let ratio = Float::ceil(Float::log2(norm / theta));
        num_traits::cast::<T, u32>(ratio).unwrap_or(0)
    } else {
        0
    };
    let scale = T::c(Float::powi(T::lit(2.0), squarings as i32), T::zero());
    let m = a.mapv(|v| v / scale);
    let bc = |k: usize| T::c(T::lit(PADE13[k]), T::zero());
    let eye = Array2::<T::C>::eye(d);
    let a2 = m.dot(&m);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let u_inner = &a6 * bc(13) + &a4 * bc(11) + &a2 * bc(9);
    let u = m.dot(&(a6.dot(&u_inner) + &a6 * bc(7) + &a4 * bc(5) + &a2 * bc(3) + &eye * bc(1)));
    let v_inner = &a6 * bc(12) + &a4 * bc(10) + &a2 * bc(8);
    let v = a6.dot(&v_inner) + &a6 * bc(6) + &a4 * bc(4) + &a2 * bc(2) + &eye * bc(0);
    let num = &v + &u;
    let den = &v - &u;
    let mut x = den.inv()?.dot(&num);
    for _ in 0..squarings {
        x = x.dot(&x);
    }
    Ok(x)
}

/// Legendre polynomial of degree m and its derivative at x, by the
/// three-term recurrence.
fn legendre<T: Real>(m: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=m {
        let kf = T::lit(k as f64);
        let p2 = (T::lit((2 * k - 1) as f64) * x * p1 - T::lit((k - 1) as f64) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = T::lit(m as f64) * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Gauss-Legendre nodes and weights on (-1, 1), by Newton iteration from
/// the Chebyshev initial guesses.
pub fn gauss_legendre<T: Real>(m: usize) -> (Vec<T>, Vec<T>) {
    assert!(m >= 2, "quadrature order must be at least 2");
    let mut nodes = vec![T::zero(); m];
    let mut weights = vec![T::zero(); m];
    for i in 0..m {
        let guess = T::PI() * T::lit((4 * i + 3) as f64) / T::lit((4 * m + 2) as f64);
        let mut x = Float::cos(guess);
        for _ in 0..100 {
            let (p, dp) = legendre::<T>(m, x);
            let dx = p / dp;
            x -= dx;
            if rabs(dx) <= T::epsilon() {
                break;
            }
        }
        let (_, dp) = legendre::<T>(m, x);
        nodes[i] = x;
        weights[i] = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Operator norm: the largest singular value.
pub fn op_norm<T: Real>(a: &Array2<T::C>) -> Result<T> {
    if a.is_empty() {
        return Ok(T::zero());
    }
    let (_, sv, _) = a.svd(false, false)?;
    Ok(sv[0])
}

/// Smallest singular value.
pub fn sigma_min<T: Real>(a: &Array2<T::C>) -> Result<T> {
    if a.is_empty() {
        return Ok(T::zero());
    }
    let (_, sv, _) = a.svd(false, false)?;
    Ok(sv[sv.len() - 1])
}
