//! Decay profiles of the matrix semigroup generated by a truncated
//! quantization.

use crate::error::{Error, Result};
use crate::linalg::{expm, op_norm};
use crate::scalar::Real;
use crate::tol;
use crate::weyl::TruncatedOperator;
use ndarray::prelude::*;
use ndarray_linalg::{Eig, Eigh, Scalar, UPLO};

/// Sampled curve t -> ||exp(tA)|| with a least-squares slope of its
/// logarithm over the trailing half of the window.
#[derive(Debug, Clone)]
pub struct NormProfile<T: Real> {
    pub times: Vec<T>,
    pub norms: Vec<T>,
    pub fitted_slope: T,
}

fn hermitian_part<T: Real>(a: &Array2<T::C>) -> Array2<T::C> {
    let half = T::c(T::lit(0.5), T::zero());
    (a + &a.t().mapv(|v| v.conj())) * half
}

/// Largest eigenvalue of the Hermitian part of the matrix; the semigroup is
/// a contraction exactly when this is nonpositive.
fn dissipativity_gap<T: Real>(a: &Array2<T::C>) -> Result<T> {
    let herm = hermitian_part::<T>(a);
    let (ev, _) = herm.eigh(UPLO::Lower)?;
    Ok(ev.iter().fold(T::neg_infinity(), |m, &v| if v > m { v } else { m }))
}

/// Sample ||exp(tA)|| at `steps + 1` equispaced times on [0, t_max].
///
/// Requires the Hermitian part of A to be negative semidefinite (the matrix
/// consequence of a symbol with nonpositive real part); fails with
/// `Hypothesis` otherwise. An internal consistency check compares
/// exp((t+d)A) against exp(tA)exp(dA) at the window midpoint and fails with
/// `Indeterminate` if the exponential is not trustworthy at that scale.
pub fn semigroup_profile<T: Real>(
    op: &TruncatedOperator<T>,
    t_max: T,
    steps: usize,
) -> Result<NormProfile<T>> {
    if !(t_max > T::zero()) {
        return Err(Error::Parse("time horizon must be positive".into()));
    }
    if steps == 0 {
        return Err(Error::Parse("need at least one time step".into()));
    }
    let a = &op.matrix;
    let scale = op_norm::<T>(a)?;
    let gap = dissipativity_gap::<T>(a)?;
    if gap > tol::scaled::<T>(tol::SPECTRAL) * (T::one() + scale) {
        return Err(Error::Hypothesis(format!(
            "Hermitian part has a positive eigenvalue {gap}; the symbol's real \
             part is not nonpositive, so the semigroup is not a contraction"
        )));
    }
    let stepsf = T::lit(steps as f64);
    let mut times = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = t_max * T::lit(i as f64) / stepsf;
        times.push(t);
        if i == 0 {
            // exp(0) is the identity exactly
            norms.push(T::one());
            continue;
        }
        let e = expm::<T>(&(a * T::c(t, T::zero())))?;
        norms.push(op_norm::<T>(&e)?);
    }

    // exponential accuracy check at the midpoint: the semigroup property
    // must hold to the configured residual tolerance
    let tm = t_max * T::lit(0.5);
    let dt = t_max / stepsf;
    let e_mid = expm::<T>(&(a * T::c(tm, T::zero())))?;
    let e_dt = expm::<T>(&(a * T::c(dt, T::zero())))?;
    let e_sum = expm::<T>(&(a * T::c(tm + dt, T::zero())))?;
    let resid = op_norm::<T>(&(&e_sum - &e_mid.dot(&e_dt)))?;
    let bound = tol::scaled::<T>(tol::EXPM_RESIDUAL) * op_norm::<T>(&e_mid)? * op_norm::<T>(&e_dt)?;
    if resid > bound {
        return Err(Error::Indeterminate(format!(
            "matrix exponential failed the semigroup consistency check: \
             residual {resid} exceeds {bound}"
        )));
    }

    // least-squares slope of log norm on the trailing half of the window
    let cutoff = t_max * T::lit(0.5);
    let mut pairs: Vec<(T, T)> = times
        .iter()
        .zip(&norms)
        .filter(|(t, _)| **t >= cutoff)
        .map(|(t, n)| (*t, num_traits::Float::ln(*n)))
        .collect();
    if pairs.len() < 2 {
        pairs = times
            .iter()
            .zip(&norms)
            .map(|(t, n)| (*t, num_traits::Float::ln(*n)))
            .collect();
    }
    let m = T::lit(pairs.len() as f64);
    let tbar = pairs.iter().map(|p| p.0).fold(T::zero(), |a, b| a + b) / m;
    let ybar = pairs.iter().map(|p| p.1).fold(T::zero(), |a, b| a + b) / m;
    let mut num = T::zero();
    let mut den = T::zero();
    for (t, y) in &pairs {
        num += (*t - tbar) * (*y - ybar);
        den += (*t - tbar) * (*t - tbar);
    }
    let fitted_slope = if den > T::zero() { num / den } else { T::zero() };

    Ok(NormProfile {
        times,
        norms,
        fitted_slope,
    })
}

/// Largest real part among the eigenvalues of the truncated operator.
pub fn spectral_abscissa<T: Real>(op: &TruncatedOperator<T>) -> Result<T> {
    let (ev, _) = op.matrix.eig()?;
    Ok(ev
        .iter()
        .fold(T::neg_infinity(), |m, v| if v.re() > m { v.re() } else { m }))
}
