//! Ellipticity certification and the numerical range of a quadratic form.
//!
//! A form is elliptic when q(X) = 0 forces X = 0. The certificate is a
//! witness angle theta with Re(e^{i theta} Q) positive definite; its
//! existence reduces ellipticity to a one-dimensional search over angles.
//! The numerical range Sigma(q) = q(R^{2n}) of an elliptic form is a closed
//! angular sector with apex 0, computed here from the image of the unit
//! sphere.

use crate::error::{Error, Result};
use crate::form::ComplexQuadraticForm;
use crate::scalar::{arg, dir, principal, rabs, rsqrt, Real};
use crate::tol;
use ndarray::prelude::*;
use ndarray_linalg::{Scalar, UPLO};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Outcome of the ellipticity check.
#[derive(Debug, Clone)]
pub struct EllipticityCertificate<T: Real> {
    /// Verdict: q vanishes only at the origin.
    pub elliptic: bool,
    /// Angle theta with Re(e^{i theta} Q) positive definite, when one
    /// exists (absent for non-elliptic forms and for n = 1 ranges of
    /// opening at least pi).
    pub witness_angle: Option<T>,
    /// Minimum of |q| over the sampled unit sphere.
    pub min_modulus: T,
}

/// Kind of numerical range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorKind {
    /// The whole complex plane (possible only for n = 1).
    FullPlane,
    /// Proper closed angular sector with apex 0.
    Sector,
}

/// Numerical range of an elliptic form as an angular sector.
///
/// `theta_min` is normalized into (−pi, pi]; `theta_max = theta_min +
/// opening` may exceed pi when the sector straddles the branch cut.
#[derive(Debug, Clone)]
pub struct Sector<T: Real> {
    pub kind: SectorKind,
    pub theta_min: T,
    pub theta_max: T,
}

impl<T: Real> Sector<T> {
    pub fn opening(&self) -> T {
        self.theta_max - self.theta_min
    }

    /// Angle rewrapped into the branch nearest the sector midline, so that
    /// comparisons against `theta_min`/`theta_max` are cut-safe.
    pub fn unwrapped(&self, theta: T) -> T {
        let mid = (self.theta_min + self.theta_max) * T::lit(0.5);
        mid + principal::<T>(theta - mid)
    }

    /// Whether the ray at angle theta lies inside the sector (within tol).
    pub fn contains_angle(&self, theta: T, tol: T) -> bool {
        if self.kind == SectorKind::FullPlane {
            return true;
        }
        let u = self.unwrapped(theta);
        u >= self.theta_min - tol && u <= self.theta_max + tol
    }

    /// Euclidean distance from z to the sector (0 when z lies inside).
    pub fn distance(&self, z: T::C) -> T {
        if self.kind == SectorKind::FullPlane {
            return T::zero();
        }
        if self.contains_angle(arg::<T>(z), T::zero()) {
            return T::zero();
        }
        let dist_to_ray = |theta: T| -> T {
            let u = dir::<T>(theta);
            let proj = z.re() * u.re() + z.im() * u.im();
            if proj >= T::zero() {
                (z - u.mul_real(proj)).abs()
            } else {
                z.abs()
            }
        };
        dist_to_ray(self.theta_min).min(dist_to_ray(self.theta_max))
    }
}

/// Point (cos t, sin t) on the unit circle in R^2.
fn circle_point<T: Real>(t: T) -> Array1<T> {
    let u = dir::<T>(t);
    array![u.re(), u.im()]
}

/// Minimum eigenvalue of Re(e^{i theta} Q).
fn min_eig_rotated<T: Real>(q: &Array2<T::C>, theta: T) -> T {
    use ndarray_linalg::Eigh;
    let w = dir::<T>(theta);
    let m = q.mapv(|z| (z * w).re());
    let (vals, _) = m.eigh(UPLO::Lower).expect("symmetric eigensolve");
    vals.iter().cloned().fold(T::infinity(), T::min)
}

/// Golden-section maximization of f on [a, b].
fn golden_max<T: Real>(mut a: T, mut b: T, iters: usize, f: impl Fn(T) -> T) -> (T, T) {
    let phi = (rsqrt(T::lit(5.0)) - T::one()) * T::lit(0.5);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) * T::lit(0.5);
    (mid, f(mid))
}

/// Deterministic unit-sphere sample set (seeded generator, gaussian
/// directions), at least `count` points.
pub(crate) fn sphere_samples<T: Real>(dim: usize, count: usize, seed: u64) -> Vec<Array1<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut x = Array1::<T>::zeros(dim);
        for v in x.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *v = T::lit(g);
        }
        let norm = rsqrt(x.dot(&x));
        if norm > T::lit(1e-6) {
            out.push(x.mapv(|v| v / norm));
        }
    }
    out
}

/// Ellipticity check via the witness-angle sweep, with an n = 1 fallback
/// on the sampled minimum modulus when no witness exists.
pub fn check_elliptic<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<EllipticityCertificate<T>> {
    let q = form.matrix();
    let scale = form.norm();
    let threshold = tol::scaled::<T>(tol::ELLIPTIC) * (T::one() + scale);

    // angle sweep: 720 angles, then golden-section refinement around the best
    let sweeps = 720usize;
    let mut best_theta = -T::PI();
    let mut best_val = T::neg_infinity();
    for k in 0..sweeps {
        let theta = -T::PI() + T::lit(2.0) * T::PI() * T::lit(k as f64) / T::lit(sweeps as f64);
        let v = min_eig_rotated::<T>(q, theta);
        if v > best_val {
            best_val = v;
            best_theta = theta;
        }
    }
    let step = T::lit(2.0) * T::PI() / T::lit(sweeps as f64);
    let (theta_ref, val_ref) =
        golden_max(best_theta - step, best_theta + step, 80, |t| min_eig_rotated::<T>(q, t));
    let (witness, witness_val) = if val_ref >= best_val {
        (theta_ref, val_ref)
    } else {
        (best_theta, best_val)
    };

    // sampled minimum modulus on the unit sphere (also reported)
    let n = form.n();
    let samples = sphere_samples::<T>(2 * n, 10_000 * 2 * n, 0x51_5EED);
    let mut min_modulus = T::infinity();
    for x in &samples {
        let v = form.eval_real(&x.view()).abs();
        if v < min_modulus {
            min_modulus = v;
        }
    }

    if witness_val > threshold {
        return Ok(EllipticityCertificate {
            elliptic: true,
            witness_angle: Some(principal::<T>(witness)),
            min_modulus,
        });
    }

    // no witness: for n = 1 the range may still miss 0 with opening >= pi
    if n == 1 {
        // dense circle sweep with local refinement of the minimum modulus
        let m = 8192usize;
        let modulus_at = |t: T| -> T {
            let x = circle_point::<T>(t);
            form.eval_real(&x.view()).abs()
        };
        let mut tmin = T::zero();
        let mut vmin = T::infinity();
        for k in 0..m {
            let t = T::PI() * T::lit(k as f64) / T::lit(m as f64);
            let v = modulus_at(t);
            if v < vmin {
                vmin = v;
                tmin = t;
            }
        }
        let step = T::PI() / T::lit(m as f64);
        let (_, refined) = golden_max(tmin - step, tmin + step, 80, |t| -modulus_at(t));
        let min_mod = (-refined).min(vmin);
        let band_lo = threshold / T::lit(10.0);
        if min_mod > threshold {
            return Ok(EllipticityCertificate {
                elliptic: true,
                witness_angle: None,
                min_modulus: min_mod,
            });
        }
        if min_mod > band_lo {
            return Err(Error::Indeterminate(format!(
                "minimum of |q| on the unit circle is {min_mod:e}, inside the tolerance band"
            )));
        }
        return Ok(EllipticityCertificate {
            elliptic: false,
            witness_angle: None,
            min_modulus: min_mod,
        });
    }

    // n >= 2: no witness means 0 is in the closed range (or numerically so)
    let band_lo = threshold / T::lit(10.0);
    if min_modulus > threshold {
        return Err(Error::Indeterminate(format!(
            "no witness angle found but min |q| = {min_modulus:e} on the sphere; \
             cannot certify either verdict"
        )));
    }
    if min_modulus > band_lo {
        return Err(Error::Indeterminate(format!(
            "minimum of |q| on the unit sphere is {min_modulus:e}, inside the tolerance band"
        )));
    }
    Ok(EllipticityCertificate {
        elliptic: false,
        witness_angle: None,
        min_modulus,
    })
}

/// Exact ellipticity decision for forms with Re q <= 0.
///
/// A real zero of q must then lie in ker Re Q, so q is elliptic precisely
/// when Im q is definite on that kernel (trivially so when the kernel is
/// zero). Two small symmetric eigensolves replace the sampled witness
/// sweep; the internal hypothesis gates use this, while [`check_elliptic`]
/// remains the certificate-producing entry point.
pub(crate) fn elliptic_given_nsd<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<()> {
    use ndarray_linalg::Eigh;
    let (a, thr) = crate::spectral::negative_real_part(form)?;
    let (w, v) = a.eigh(UPLO::Lower).map_err(Error::Backend)?;
    let kernel: Vec<usize> = (0..w.len()).filter(|&i| rabs(w[i]) <= thr).collect();
    if kernel.is_empty() {
        return Ok(());
    }
    let b = form.im_matrix();
    let m = kernel.len();
    let mut p = Array2::<T>::zeros((m, m));
    for (pi, &i) in kernel.iter().enumerate() {
        let bvi = b.dot(&v.column(i));
        for (pj, &j) in kernel.iter().enumerate() {
            p[[pi, pj]] = v.column(j).dot(&bvi);
        }
    }
    let (mu, _) = p.eigh(UPLO::Lower).map_err(Error::Backend)?;
    if mu[0] > thr || mu[m - 1] < -thr {
        return Ok(());
    }
    Err(Error::Hypothesis(
        "form is not elliptic: Im q is not definite on the kernel of Re q".into(),
    ))
}

/// Unwrapped argument of q(X) relative to a witness angle: with
/// Re(e^{i w} q) > 0 the shifted value lies in the open right half-plane,
/// so −w + principal_arg(e^{i w} q(X)) is a continuous branch.
fn unwrapped_arg<T: Real>(form: &ComplexQuadraticForm<T>, witness: T, x: &ArrayView1<T>) -> T {
    let v = form.eval_real(x);
    let w = dir::<T>(witness);
    arg::<T>(v * w) - witness
}

/// Coordinate-descent refinement of an extremal unwrapped argument on the
/// unit sphere. `sign` = +1 maximizes, −1 minimizes.
fn refine_extremum<T: Real>(
    form: &ComplexQuadraticForm<T>,
    witness: T,
    start: &Array1<T>,
    sign: T,
) -> (Array1<T>, T) {
    let dim = start.len();
    let mut x = start.clone();
    let mut delta = T::lit(0.5);
    let objective = |x: &Array1<T>| -> T { sign * unwrapped_arg(form, witness, &x.view()) };
    let mut best = objective(&x);
    for _pass in 0..8 {
        for i in 0..dim {
            let (s, v) = golden_max(-delta, delta, 40, |s| {
                let mut y = x.clone();
                y[i] += s;
                let norm = rsqrt(y.dot(&y));
                if norm < T::lit(1e-9) {
                    return T::neg_infinity();
                }
                let y = y.mapv(|u| u / norm);
                objective(&y)
            });
            if v > best {
                x[i] += s;
                let norm = rsqrt(x.dot(&x));
                x = x.mapv(|u| u / norm);
                best = v;
            }
        }
        delta *= T::lit(0.3);
    }
    (x, sign * best)
}

pub(crate) struct RangeWitnesses<T: Real> {
    pub sector: Sector<T>,
    /// Unit-sphere point attaining theta_min.
    pub x_min: Array1<T>,
    /// Unit-sphere point attaining theta_max.
    pub x_max: Array1<T>,
}

/// Numerical range with the extremal sphere points retained.
pub(crate) fn numerical_range_with_witnesses<T: Real>(
    form: &ComplexQuadraticForm<T>,
) -> Result<RangeWitnesses<T>> {
    let cert = check_elliptic(form)?;
    if !cert.elliptic {
        return Err(Error::Hypothesis(
            "numerical range requires an elliptic form".into(),
        ));
    }
    let n = form.n();

    if let Some(w) = cert.witness_angle {
        // proper sector: sample, then refine both extremes
        let samples = sphere_samples::<T>(2 * n, 10_000 * 2 * n, 0x0A_1B2C);
        let mut amin = T::infinity();
        let mut amax = T::neg_infinity();
        let mut xmin = samples[0].clone();
        let mut xmax = samples[0].clone();
        for x in &samples {
            let a = unwrapped_arg(form, w, &x.view());
            if a < amin {
                amin = a;
                xmin = x.clone();
            }
            if a > amax {
                amax = a;
                xmax = x.clone();
            }
        }
        let (xmin, amin_r) = refine_extremum(form, w, &xmin, -T::one());
        let (xmax, amax_r) = refine_extremum(form, w, &xmax, T::one());
        let amin = amin.min(amin_r);
        let amax = amax.max(amax_r);
        // canonicalize: theta_min in (−pi, pi], opening preserved
        let theta_min = principal::<T>(amin);
        let theta_max = theta_min + (amax - amin);
        return Ok(RangeWitnesses {
            sector: Sector {
                kind: SectorKind::Sector,
                theta_min,
                theta_max,
            },
            x_min: xmin,
            x_max: xmax,
        });
    }

    // n = 1 without witness: trace a continuous branch of arg along the
    // half-circle (q(−X) = q(X), so t in [0, pi] covers the whole image)
    debug_assert_eq!(n, 1);
    let m = 16384usize;
    let mut prev = {
        let x: Array1<T> = array![T::one(), T::zero()];
        arg::<T>(form.eval_real(&x.view()))
    };
    let mut amin = prev;
    let mut amax = prev;
    let mut tmin = T::zero();
    let mut tmax = T::zero();
    for k in 1..=m {
        let t = T::PI() * T::lit(k as f64) / T::lit(m as f64);
        let x = circle_point::<T>(t);
        let raw = arg::<T>(form.eval_real(&x.view()));
        let a = prev + principal::<T>(raw - prev);
        if a < amin {
            amin = a;
            tmin = t;
        }
        if a > amax {
            amax = a;
            tmax = t;
        }
        prev = a;
    }
    if amax - amin >= T::lit(2.0) * T::PI() {
        let x0 = array![T::one(), T::zero()];
        return Ok(RangeWitnesses {
            sector: Sector {
                kind: SectorKind::FullPlane,
                theta_min: -T::PI(),
                theta_max: T::PI(),
            },
            x_min: x0.clone(),
            x_max: x0,
        });
    }
    let theta_min = principal::<T>(amin);
    Ok(RangeWitnesses {
        sector: Sector {
            kind: SectorKind::Sector,
            theta_min,
            theta_max: theta_min + (amax - amin),
        },
        x_min: circle_point::<T>(tmin),
        x_max: circle_point::<T>(tmax),
    })
}

/// Numerical range Sigma(q) of an elliptic form.
pub fn numerical_range<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<Sector<T>> {
    Ok(numerical_range_with_witnesses(form)?.sector)
}
