//! Spectrum-separating integration contours and Cauchy-integral
//! reconstruction of the semigroup from resolvents.
//!
//! The curve runs upward through the left half plane: a vertical segment
//! Re z = -c1 t0 for |t| <= t0, continued by gamma(t) = -c1|t| + i t^m with
//! odd exponent m = 4n - 1. All eigenvalues of the truncation stay strictly
//! left of the curve with a margin of a quarter of the decay rate, so the
//! integral of e^{sz}(z - A)^{-1} over the curve reproduces the semigroup.

use crate::error::{Error, Result};
use crate::form::{frob, ComplexQuadraticForm};
use crate::linalg::{expm, gauss_legendre, op_norm};
use crate::order::check_order_hypotheses;
use crate::resolvent::resolvent_norm;
use crate::scalar::{rabs, Real};
use crate::spectral::{classify_real_part, decay_rate, RealPartKind};
use crate::weyl::TruncatedOperator;
use ndarray::prelude::*;
use ndarray_linalg::{Eig, Inverse, Scalar};
use rayon::prelude::*;

/// Parameters of a separating contour: Re gamma(t) <= -b everywhere, with
/// slope c1 and odd tail exponent m. c2 records the observed supremum of
/// resolvent_norm(z)·(1+|z|)^{1/m} along sampled curve points.
#[derive(Debug, Clone, Copy)]
pub struct ContourSpec<T: Real> {
    pub c1: T,
    pub t0: T,
    pub b: T,
    pub m: usize,
    pub c2: T,
}

impl<T: Real> ContourSpec<T> {
    /// The curve point at parameter t.
    pub fn gamma(&self, t: T) -> T::C {
        let reach = if rabs(t) >= self.t0 { rabs(t) } else { self.t0 };
        T::c(-self.c1 * reach, num_traits::Float::powi(t, self.m as i32))
    }

    /// Derivative of the parametrization (away from the two corner points).
    pub fn gamma_prime(&self, t: T) -> T::C {
        let dre = if rabs(t) > self.t0 {
            -self.c1 * num_traits::Float::signum(t)
        } else {
            T::zero()
        };
        let dim = T::lit(self.m as f64) * num_traits::Float::powi(t, self.m as i32 - 1);
        T::c(dre, dim)
    }
}

/// Build a contour separating the spectrum of the truncation.
///
/// Requires an elliptic symbol with nonpositive, nonzero real part and no
/// real Hamilton eigenvalues. Sets b to half the decay rate and m = 4n - 1,
/// then halves the slope c1 (starting from 1) until every eigenvalue of the
/// truncation clears the curve by a quarter of the decay rate, and centers
/// t0 in its feasible interval. Fails with `Indeterminate` when the
/// truncated spectrum cannot be separated.
pub fn build_contour<T: Real>(
    form: &ComplexQuadraticForm<T>,
    op: &TruncatedOperator<T>,
) -> Result<ContourSpec<T>> {
    check_order_hypotheses(form)?;
    let class = classify_real_part(form)?;
    if class.kind == RealPartKind::Zero {
        return Err(Error::Hypothesis(
            "the real part of the symbol vanishes; the semigroup does not decay \
             and no separating contour exists"
        .into(),
        ));
    }
    let a0 = decay_rate(form)?.a0;
    let b = a0 * T::lit(0.5);
    let margin = a0 * T::lit(0.25);
    let m = 4 * form.n() - 1;

    let (eigs, _) = op.matrix.eig()?;
    // clearance of each truncation eigenvalue once the margin is spent
    let mut min_clear = T::infinity();
    for z in eigs.iter() {
        let g = -z.re() - margin;
        if g < min_clear {
            min_clear = g;
        }
    }
    if !(min_clear > b) {
        return Err(Error::Indeterminate(format!(
            "truncation eigenvalues clear the separation margin by only \
             {min_clear}, below the curve height {b}; refine the truncation"
        )));
    }
    let exponent = T::one() / T::lit(m as f64);
    let mut c1 = T::one();
    let mut halvings = 0;
    loop {
        let ok = eigs.iter().all(|z| {
            let reach = num_traits::Float::powf(rabs(z.im()), exponent);
            c1 * reach <= -z.re() - margin
        });
        if ok {
            break;
        }
        c1 = c1 * T::lit(0.5);
        halvings += 1;
        if halvings > 60 {
            return Err(Error::Indeterminate(
                "no contour slope separates the truncated spectrum".into(),
            ));
        }
    }
    // feasible vertical-segment range: c1 t0 in [b, min_clear]
    let t0 = (b + min_clear) / (T::lit(2.0) * c1);

    let mut spec = ContourSpec {
        c1,
        t0,
        b,
        m,
        c2: T::zero(),
    };
    // defensive sweep of the curve-height invariant
    let samples = 200;
    for k in 0..=samples {
        let t = spec.t0 * T::lit(8.0) * (T::lit(k as f64) / T::lit(samples as f64) - T::lit(0.5));
        if spec.gamma(t).re() > -b + tolerance_band(b) {
            return Err(Error::Indeterminate(
                "contour fails its own height invariant".into(),
            ));
        }
    }
    // record the observed weighted resolvent bound along the curve
    let mut c2 = T::zero();
    for k in 0..=40 {
        let t = spec.t0 * T::lit(8.0) * (T::lit(k as f64) / T::lit(40.0) - T::lit(0.5));
        let z = spec.gamma(t);
        let w = resolvent_norm(op, z)?
            * num_traits::Float::powf(T::one() + z.abs(), exponent);
        if w > c2 {
            c2 = w;
        }
    }
    spec.c2 = c2;
    Ok(spec)
}

fn tolerance_band<T: Real>(scale: T) -> T {
    T::lit(1e-12) * (T::one() + scale)
}

/// Matrix-valued integral (1/2 pi i) \int f(z) (z - A)^{-1} dz over the
/// contour, with `osc` the oscillation rate of f along the imaginary
/// direction (s for f = e^{sz}, zero for non-oscillatory weights). The
/// infinite tail is truncated once the pointwise integrand bound
/// c2 (1+|z|)^{-1/m} |f(z)| falls below 1e-12 of the accumulated norm.
fn contour_integral<T, F>(
    op: &TruncatedOperator<T>,
    spec: &ContourSpec<T>,
    f: F,
    osc: T,
) -> Result<Array2<T::C>>
where
    T: Real,
    F: Fn(T::C) -> T::C + Sync,
{
    let d = op.dim();
    let (nodes, weights) = gauss_legendre::<T>(20);
    let zero = T::c(T::zero(), T::zero());
    let mut acc = Array2::<T::C>::from_elem((d, d), zero);

    let node_sum = |lo: T, hi: T| -> Result<Array2<T::C>> {
        let mid = (lo + hi) * T::lit(0.5);
        let rad = (hi - lo) * T::lit(0.5);
        let mut sum = Array2::<T::C>::from_elem((d, d), zero);
        for (x, w) in nodes.iter().zip(&weights) {
            let t = mid + rad * *x;
            let z = spec.gamma(t);
            let shifted = Array2::from_shape_fn((d, d), |(i, j)| {
                if i == j {
                    z - op.matrix[[i, j]]
                } else {
                    zero - op.matrix[[i, j]]
                }
            });
            let res = shifted.inv()?;
            let factor = f(z) * spec.gamma_prime(t) * T::c(*w * rad, T::zero());
            sum = sum + res * factor;
        }
        Ok(sum)
    };

    // evaluate a parameter interval with enough subpanels that each sees a
    // bounded amount of phase (and of exponential decay, which limits
    // accuracy the same way)
    let integrate = |lo: T, hi: T, acc: &mut Array2<T::C>| -> Result<()> {
        let span = num_traits::Float::powi(rabs(hi), spec.m as i32)
            - num_traits::Float::powi(rabs(lo), spec.m as i32);
        let variation = rabs(osc) * (rabs(span) + spec.c1 * (hi - lo));
        let per_panel = T::lit(40.0);
        let want = num_traits::Float::ceil(variation / per_panel);
        let count = num_traits::cast::<T, usize>(want).unwrap_or(2).max(2);
        let width = (hi - lo) / T::lit(count as f64);
        let chunk = 64;
        let mut start = 0;
        while start < count {
            let stop = (start + chunk).min(count);
            let parts = (start..stop)
                .into_par_iter()
                .map(|k| {
                    let a = lo + width * T::lit(k as f64);
                    let b = if k + 1 == count {
                        hi
                    } else {
                        lo + width * T::lit((k + 1) as f64)
                    };
                    node_sum(a, b)
                })
                .collect::<Result<Vec<_>>>()?;
            for p in parts {
                *acc = &*acc + &p;
            }
            start = stop;
        }
        Ok(())
    };

    // central segment, fixed split
    let panels = 8;
    let step = spec.t0 * T::lit(2.0) / T::lit(panels as f64);
    for k in 0..panels {
        let lo = -spec.t0 + step * T::lit(k as f64);
        let hi = -spec.t0 + step * T::lit((k + 1) as f64);
        integrate(lo, hi, &mut acc)?;
    }

    // dyadic tail panels on both sides, truncated by the integrand bound
    let floor_rel = T::lit(1e-12);
    let exponent = T::one() / T::lit(spec.m as f64);
    let mut converged = false;
    let mut edge = spec.t0;
    for _ in 0..64 {
        let next = edge * T::lit(2.0);
        let zp = spec.gamma(edge);
        let zm = spec.gamma(-edge);
        let weight = num_traits::Float::powf(T::one() + zp.abs(), -exponent);
        let biggest = if f(zp).abs() > f(zm).abs() {
            f(zp).abs()
        } else {
            f(zm).abs()
        };
        let bound = spec.c2 * weight * biggest;
        if bound <= floor_rel * frob::<T>(&acc) {
            converged = true;
            break;
        }
        integrate(edge, next, &mut acc)?;
        integrate(-next, -edge, &mut acc)?;
        edge = next;
    }
    if !converged {
        return Err(Error::Indeterminate(
            "contour tail integral did not meet its decay bound".into(),
        ));
    }
    let two_pi_i = T::c(T::zero(), T::lit(2.0) * T::PI());
    Ok(acc.mapv(|v| v / two_pi_i))
}

/// Reconstruct exp(sA) as the contour integral of e^{sz}(z - A)^{-1} and
/// report it together with its relative deviation from the direct matrix
/// exponential.
pub fn contour_semigroup<T: Real>(
    op: &TruncatedOperator<T>,
    spec: &ContourSpec<T>,
    s: T,
) -> Result<(Array2<T::C>, T)> {
    if !(s > T::zero()) {
        return Err(Error::Parse("semigroup time must be positive".into()));
    }
    let sc = T::c(s, T::zero());
    let quad = contour_integral(op, spec, |z| (z * sc).exp(), s)?;
    let direct = expm::<T>(&op.matrix.mapv(|v| v * sc))?;
    let rel = op_norm::<T>(&(&quad - &direct))? / op_norm::<T>(&direct)?;
    Ok((quad, rel))
}

/// Residual of the weighted resolvent identity: the contour integral of
/// (z - A)^{-1}/(z - 1) must equal -(I - A)^{-1}, since the weight's pole
/// lies right of the curve. Returns the relative deviation.
pub fn weighted_resolvent_identity<T: Real>(
    op: &TruncatedOperator<T>,
    spec: &ContourSpec<T>,
) -> Result<T> {
    let one = T::c(T::one(), T::zero());
    let quad = contour_integral(op, spec, |z| one / (z - one), T::zero())?;
    let d = op.dim();
    let shifted = Array2::from_shape_fn((d, d), |(i, j)| {
        if i == j {
            one - op.matrix[[i, j]]
        } else {
            T::c(T::zero(), T::zero()) - op.matrix[[i, j]]
        }
    });
    let direct = shifted.inv()?.mapv(|v| T::c(T::zero(), T::zero()) - v);
    Ok(op_norm::<T>(&(&quad - &direct))? / op_norm::<T>(&direct)?)
}
