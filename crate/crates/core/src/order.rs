//! The auxiliary positive form r and the order of the symbol.
//!
//! For an elliptic form with Re Q negative semidefinite and no real
//! Hamilton eigenvalues, the sum r(X) = -sum_j Re q((Im F)^j X) over
//! j = 0..2n-1 is positive definite, so every nonzero phase-space point
//! has a finite order: the first j0 with Re q((Im F)^{j0} X0) strictly
//! negative. The order k = 2 j0 governs the loss of derivatives in the
//! resolvent estimates and equals the length of the first nonvanishing
//! iterated bracket of Im q against Re q.

use crate::error::{Error, Result};
use crate::form::{frob_real, ComplexQuadraticForm};
use crate::hamilton::{hamilton_map, poisson_bracket};
use crate::scalar::{arg, rabs, rsqrt, Real};
use crate::sector::{numerical_range_with_witnesses, sphere_samples, SectorKind};
use crate::spectral::negative_real_part;
use crate::tol;
use ndarray::prelude::*;
use ndarray_linalg::{Eig, Eigh, Scalar, UPLO};

/// The form r(X) = -sum_{j<2n} Re q((Im F)^j X) with its definiteness
/// verdict.
#[derive(Debug, Clone)]
pub struct RForm<T: Real> {
    pub matrix: Array2<T>,
    pub positive_definite: bool,
    pub min_eigenvalue: T,
}

/// Compute r and check positive definiteness. Requires Re Q <= 0.
pub fn r_form<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<RForm<T>> {
    let (_, _) = negative_real_part(form)?;
    let n = form.n();
    let d = 2 * n;
    let re_q = form.re_matrix();
    let im_f = hamilton_map(form).im();
    let mut r = Array2::<T>::zeros((d, d));
    let mut power = Array2::<T>::eye(d);
    for j in 0..d {
        if j > 0 {
            power = power.dot(&im_f);
        }
        let term = power.t().dot(&re_q).dot(&power);
        r -= &term;
    }
    let r = (&r + &r.t()) * T::lit(0.5);
    let (ev, _) = r.eigh(UPLO::Lower).map_err(Error::Backend)?;
    let min_eigenvalue = ev[0];
    let thr = tol::scaled::<T>(tol::SPECTRAL) * (T::one() + frob_real(&r));
    Ok(RForm {
        matrix: r,
        positive_definite: min_eigenvalue > thr,
        min_eigenvalue,
    })
}

/// Order of the symbol at a phase-space point.
#[derive(Debug, Clone)]
pub struct OrderResult<T: Real> {
    /// Smallest j with Re q((Im F)^j X0) strictly negative.
    pub j0: usize,
    /// The order, 2 j0.
    pub k: usize,
    /// Value of the iterated bracket H_{Im q}^{2 j0} Re q at X0.
    pub bracket_value: T::C,
    /// Always true on success; the search failing is an error.
    pub finite: bool,
}

impl<T: Real> OrderResult<T> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "j0": self.j0,
            "k": self.k,
            "finite": self.finite,
            "bracket_value": {
                "re": self.bracket_value.re().to_f64(),
                "im": self.bracket_value.im().to_f64(),
            },
        })
    }
}

/// Check the standing hypotheses of the order analysis: ellipticity,
/// Re Q <= 0, and a Hamilton map free of real eigenvalues.
pub(crate) fn check_order_hypotheses<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<()> {
    crate::sector::elliptic_given_nsd(form)?;
    let f = hamilton_map(form);
    let tolr = tol::scaled::<T>(tol::SPECTRAL) * (T::one() + f.norm());
    let (eigs, _) = f.matrix().eig().map_err(Error::Backend)?;
    if eigs.iter().any(|z| rabs(z.im()) <= tolr) {
        return Err(Error::Hypothesis(
            "Hamilton map has real eigenvalues; the order is not guaranteed finite".into(),
        ));
    }
    Ok(())
}

/// Order of the symbol at X0: the least j0 <= 2n-1 with
/// Re q((Im F)^{j0} X0) < 0, reported as k = 2 j0 together with the value
/// of the distinguished iterated bracket.
pub fn order_at_point<T: Real>(
    form: &ComplexQuadraticForm<T>,
    x0: &Array1<T>,
) -> Result<OrderResult<T>> {
    let n = form.n();
    let d = 2 * n;
    if x0.len() != d {
        return Err(Error::Dimension(format!(
            "point has dimension {}, expected {d}",
            x0.len()
        )));
    }
    let norm2 = x0.dot(x0);
    if !(norm2 > T::zero()) {
        return Err(Error::Parse("order is undefined at the zero point".into()));
    }
    check_order_hypotheses(form)?;

    let re_q = form.re_matrix();
    let im_f = hamilton_map(form).im();
    // strict-negativity band relative to the form size and |X0|^2
    let band = tol::scaled::<T>(tol::ORDER) * frob_real(&re_q) * norm2;

    let mut xj = x0.clone();
    let mut j0 = None;
    for j in 0..d {
        if j > 0 {
            xj = im_f.dot(&xj);
        }
        let val = xj.dot(&re_q.dot(&xj));
        if val < -band {
            j0 = Some((j, val));
            break;
        }
    }
    let (j0, witness_val) = j0.ok_or_else(|| {
        Error::Hypothesis(format!(
            "no strictly negative term within {} iterations; hypotheses violated",
            d
        ))
    })?;

    // iterated bracket H_{Im q}^{2 j0} Re q, evaluated at X0
    let re_form = real_part_form(form)?;
    let im_form = imag_part_form(form)?;
    let mut b = re_form;
    for _ in 0..2 * j0 {
        b = poisson_bracket(&im_form, &b)?;
    }
    let bracket_value = b.evaluate(x0)?;

    // the bracket must not vanish and must agree in sign with the witness
    let bthr = tol::scaled::<T>(tol::ORDER) * (T::one() + b.norm()) * norm2;
    if rabs(bracket_value.re()) <= bthr {
        return Err(Error::Indeterminate(format!(
            "iterated bracket vanishes at the point (value {:e})",
            bracket_value.re()
        )));
    }
    if (bracket_value.re() > T::zero()) != (witness_val > T::zero()) {
        return Err(Error::Indeterminate(
            "iterated bracket disagrees in sign with the defining term".into(),
        ));
    }

    Ok(OrderResult {
        j0,
        k: 2 * j0,
        bracket_value,
        finite: true,
    })
}

/// Order of the symbol on the ray e^{i theta} R_+ of the numerical range.
///
/// Finds a unit preimage X0 with arg q(X0) = theta (bisection along great
/// circles between sampled sphere points; the extremal witnesses handle the
/// boundary rays) and returns its order, which is shared by the whole ray.
pub fn order_on_ray<T: Real>(
    form: &ComplexQuadraticForm<T>,
    theta: T,
) -> Result<(OrderResult<T>, Array1<T>)> {
    check_order_hypotheses(form)?;
    let wit = numerical_range_with_witnesses(form)?;
    if wit.sector.kind == SectorKind::FullPlane {
        return Err(Error::Hypothesis(
            "numerical range covers the plane; rays are not isolated".into(),
        ));
    }
    let sector = &wit.sector;
    let atol = tol::scaled::<T>(tol::ADMISSIBLE_ANGLE);
    let theta_u = sector.unwrapped(theta);
    if !sector.contains_angle(theta, atol) {
        return Err(Error::Hypothesis(format!(
            "ray at angle {:?} lies outside the numerical range",
            theta
        )));
    }

    // boundary rays: the extremal witnesses are the preimages
    if rabs(theta_u - sector.theta_min) <= T::lit(1e-6) {
        let res = order_at_point(form, &wit.x_min)?;
        return Ok((res, wit.x_min));
    }
    if rabs(theta_u - sector.theta_max) <= T::lit(1e-6) {
        let res = order_at_point(form, &wit.x_max)?;
        return Ok((res, wit.x_max));
    }

    // interior ray: find a sign change of g = arg q - theta among sphere
    // samples (witness points included as guaranteed extremes)
    let n = form.n();
    let d = 2 * n;
    let g = |x: &Array1<T>| -> T {
        let v = form.evaluate(x).expect("dimension checked");
        sector.unwrapped(arg::<T>(v)) - theta_u
    };
    let mut lo: Option<(Array1<T>, T)> = Some((wit.x_min.clone(), g(&wit.x_min)));
    let mut hi: Option<(Array1<T>, T)> = Some((wit.x_max.clone(), g(&wit.x_max)));
    for x in sphere_samples::<T>(d, 256 * d, 0x0DE4) {
        let v = g(&x);
        if v <= T::zero() {
            if lo.as_ref().map_or(true, |(_, best)| v > *best) {
                lo = Some((x.clone(), v));
            }
        } else if hi.as_ref().map_or(true, |(_, best)| v < *best) {
            hi = Some((x.clone(), v));
        }
    }
    let (mut a, mut ga) = lo.ok_or_else(|| {
        Error::Indeterminate("no sphere sample below the requested ray angle".into())
    })?;
    let (mut b, _) = hi.ok_or_else(|| {
        Error::Indeterminate("no sphere sample above the requested ray angle".into())
    })?;
    if !(ga <= T::zero()) {
        return Err(Error::Indeterminate(
            "sampling failed to bracket the requested ray".into(),
        ));
    }

    // bisection along the great circle between a and b
    let mut x0 = a.clone();
    let mut converged = false;
    for _ in 0..200 {
        let mid_raw = (&a + &b) * T::lit(0.5);
        let nn = rsqrt(mid_raw.dot(&mid_raw));
        if !(nn > T::lit(1e-12)) {
            // near-antipodal endpoints: perturb deterministically
            return Err(Error::Indeterminate(
                "degenerate bisection chord while searching the ray preimage".into(),
            ));
        }
        let mid = mid_raw.mapv(|v| v / nn);
        let gm = g(&mid);
        if rabs(gm) <= T::lit(1e-12) {
            x0 = mid;
            converged = true;
            break;
        }
        if (gm > T::zero()) == (ga > T::zero()) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
        x0 = a.clone();
    }
    if !converged {
        let gfin = g(&x0);
        if rabs(gfin) > T::lit(1e-9) {
            return Err(Error::Indeterminate(format!(
                "ray preimage search stalled at angular error {:e}",
                gfin
            )));
        }
    }
    let res = order_at_point(form, &x0)?;
    Ok((res, x0))
}

/// The real part of a form as a (real-valued) complex form.
fn real_part_form<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<ComplexQuadraticForm<T>> {
    let q = form.re_matrix().mapv(|v| T::c(v, T::zero()));
    ComplexQuadraticForm::new(form.n(), q)
}

/// The imaginary part of a form as a (real-valued) complex form.
fn imag_part_form<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<ComplexQuadraticForm<T>> {
    let q = form.im_matrix().mapv(|v| T::c(v, T::zero()));
    ComplexQuadraticForm::new(form.n(), q)
}
