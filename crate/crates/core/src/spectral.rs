//! Eigenstructure of the Hamilton map and the exact operator spectrum.
//!
//! The spectrum of the Weyl quantization of an elliptic form with sector
//! range is the lattice sum of admissible Hamilton eigenvalues: the points
//! sum_lambda (r_lambda + 2 k_lambda)(-i lambda) over multi-indices k,
//! where lambda ranges over the eigenvalues of F with -i lambda inside the
//! range sector. The spectral abscissa a0 is the decay rate of the
//! semigroup; the k = 0 point realizes it.

use crate::error::{Error, Result};
use crate::form::ComplexQuadraticForm;
use crate::hamilton::{hamilton_map, j_real, HamiltonMap};
use crate::scalar::{arg, rabs, rsqrt, Real};
use crate::sector::{check_elliptic, numerical_range, Sector, SectorKind};
use crate::tol;
use ndarray::prelude::*;
use ndarray_linalg::{Eig, Eigh, Scalar, UPLO};
use num_traits::Float;

/// A clustered eigenvalue of the Hamilton map with algebraic multiplicity.
#[derive(Debug, Clone)]
pub struct HamiltonEig<T: Real> {
    pub lambda: T::C,
    /// Algebraic multiplicity of the cluster.
    pub r: usize,
}

/// Eigenvalues of F clustered into distinct values with multiplicities.
///
/// Eigenvalues of a Hamilton map occur in +-lambda pairs; the pairing is
/// enforced by symmetrizing matched clusters. Sorted by descending
/// imaginary part, then descending real part.
pub fn hamilton_spectrum<T: Real>(f: &HamiltonMap<T>) -> Result<Vec<HamiltonEig<T>>> {
    let (eigs, _) = f
        .matrix()
        .eig()
        .map_err(Error::Backend)?;
    let ctol = tol::scaled::<T>(tol::CLUSTER) * f.norm();
    let mut clusters = cluster(eigs.as_slice().unwrap(), ctol);

    // well-separated clusters, else multiplicities are ambiguous
    for i in 0..clusters.len() {
        for j in 0..i {
            let gap = (clusters[i].0 - clusters[j].0).abs();
            if gap < ctol * T::lit(10.0) {
                return Err(Error::Indeterminate(format!(
                    "eigenvalue clusters separated by {gap:e}, below 10x the clustering \
                     tolerance; multiplicities are ambiguous"
                )));
            }
        }
    }

    // +-pairing: match each cluster against its negative and symmetrize
    let mut paired = vec![false; clusters.len()];
    for i in 0..clusters.len() {
        if paired[i] {
            continue;
        }
        let (li, ri) = clusters[i];
        if li.abs() <= ctol {
            paired[i] = true;
            clusters[i].0 = T::c(T::zero(), T::zero());
            continue;
        }
        let mut best: Option<(usize, T)> = None;
        for (j, &(lj, _)) in clusters.iter().enumerate() {
            if j == i || paired[j] {
                continue;
            }
            let d = (li + lj).abs();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, d)) if d <= ctol * T::lit(10.0) && clusters[j].1 == ri => {
                let sym = (li - clusters[j].0).mul_real(T::lit(0.5));
                clusters[i].0 = sym;
                clusters[j].0 = -sym;
                paired[i] = true;
                paired[j] = true;
            }
            _ => {
                return Err(Error::Indeterminate(format!(
                    "eigenvalue {li} has no matching -lambda partner; clustering tolerance \
                     too tight for this conditioning"
                )))
            }
        }
    }

    clusters.sort_by(|a, b| {
        (b.0.im(), b.0.re())
            .partial_cmp(&(a.0.im(), a.0.re()))
            .unwrap()
    });
    Ok(clusters
        .into_iter()
        .map(|(lambda, r)| HamiltonEig { lambda, r })
        .collect())
}

/// Greedy single-linkage clustering of eigenvalues within dist.
fn cluster<T: Real>(eigs: &[T::C], dist: T) -> Vec<(T::C, usize)> {
    let mut groups: Vec<Vec<T::C>> = Vec::new();
    let mut sorted: Vec<T::C> = eigs.to_vec();
    sorted.sort_by(|a, b| (a.re(), a.im()).partial_cmp(&(b.re(), b.im())).unwrap());
    for z in sorted {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|w| (*w - z).abs() <= dist))
        {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let count = T::lit(g.len() as f64);
            let mean = g
                .iter()
                .fold(T::c(T::zero(), T::zero()), |acc, z| acc + *z)
                .div_real(count);
            (mean, g.len())
        })
        .collect()
}

/// Structure of the real part of a form with Re q <= 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealPartKind {
    /// At least one oscillator block: guaranteed constant-free decay.
    NonNilpotent,
    /// No oscillator block but Re q not identically zero: (Re F)^2 = 0.
    Nilpotent,
    /// Re q identically zero.
    Zero,
}

/// Block counts of the symplectic normal form of -Re q.
#[derive(Debug, Clone)]
pub struct RealPartClass<T: Real> {
    pub kind: RealPartKind,
    /// Number of oscillator blocks.
    pub k: usize,
    /// Number of rank-one blocks; 2k + l = rank(Re Q).
    pub l: usize,
    /// Oscillator frequencies, sorted descending; lambdas[0] is the
    /// constant-free decay rate in the non-nilpotent case.
    pub lambdas: Vec<T>,
}

/// Verify Re Q <= 0 and return A = -Re Q with its norm-based tolerance.
pub(crate) fn negative_real_part<T: Real>(
    form: &ComplexQuadraticForm<T>,
) -> Result<(Array2<T>, T)> {
    let a = form.re_matrix().mapv(|v| -v);
    let thr = tol::scaled::<T>(tol::ELLIPTIC) * (T::one() + form.norm());
    let (w, _) = a.eigh(UPLO::Lower).map_err(Error::Backend)?;
    let min = w.iter().cloned().fold(T::infinity(), T::min);
    if min < -thr {
        return Err(Error::Hypothesis(format!(
            "Re q takes positive values (eigenvalue {:e} of -Re Q); the analysis \
             requires Re q <= 0",
            min
        )));
    }
    Ok((a, thr))
}

/// Classify the real part of q: oscillator block count k, rank-one block
/// count l, and the frequencies lambda_j.
///
/// Requires Re Q negative semidefinite. The frequencies are the positive
/// eigenvalues of the Hermitian matrix -i A^{1/2} J A^{1/2}, A = -Re Q,
/// which shares its nonzero spectrum with J·A = -Re F.
pub fn classify_real_part<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<RealPartClass<T>> {
    let (a, thr) = negative_real_part(form)?;
    let n = form.n();
    let (w, v) = a.eigh(UPLO::Lower).map_err(Error::Backend)?;
    let rank = w.iter().filter(|&&x| x > thr).count();
    // rank-clamped square root: rooting sub-threshold eigenvalue noise
    // would amplify it to sqrt(eps) and fake oscillator frequencies
    let sqrt_w = w.mapv(|x| if x > thr { rsqrt(x) } else { T::zero() });
    // A^{1/2} = V diag(sqrt w) V^T
    let mut half = Array2::<T>::zeros((2 * n, 2 * n));
    for (j, col) in v.columns().into_iter().enumerate() {
        let s = sqrt_w[j];
        for i in 0..2 * n {
            for k in 0..2 * n {
                half[[i, k]] += col[i] * s * col[k];
            }
        }
    }
    let j = j_real::<T>(n);
    let skew = half.dot(&j).dot(&half);
    // -i * (real skew-symmetric) is Hermitian with +-lambda_j eigenvalues
    let herm = skew.mapv(|x| T::c(T::zero(), -x));
    let (mu, _) = herm.eigh(UPLO::Lower).map_err(Error::Backend)?;
    let mut lambdas: Vec<T> = mu.iter().cloned().filter(|&x| x > thr).collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let k = lambdas.len();
    let l = rank.saturating_sub(2 * k);

    let kind = if rank == 0 {
        RealPartKind::Zero
    } else if k == 0 {
        RealPartKind::Nilpotent
    } else {
        RealPartKind::NonNilpotent
    };
    if kind == RealPartKind::Nilpotent {
        // index-2 nilpotency of Re F is a theorem under the hypotheses;
        // verify rather than assume
        let m = hamilton_map(form).re();
        let sq = m.dot(&m);
        let norm2 = crate::form::frob_real(&m);
        let dev = crate::form::frob_real(&sq);
        if dev > tol::scaled::<T>(tol::SPECTRAL) * norm2 * norm2 {
            return Err(Error::Indeterminate(format!(
                "classified nilpotent but ||(Re F)^2|| = {dev:e} is not negligible"
            )));
        }
    }
    Ok(RealPartClass { kind, k, l, lambdas })
}

/// An eigenvalue admitted into the spectrum formula: -i lambda lies in the
/// closed range sector (within angular tolerance).
#[derive(Debug, Clone)]
pub struct AdmissibleEig<T: Real> {
    pub lambda: T::C,
    pub r: usize,
    /// Whether -i lambda sits on the sector boundary within tolerance;
    /// boundary admissions are tie-break decisions worth surfacing.
    pub on_boundary: bool,
}

/// One generator (lambda, k_lambda) of a spectrum point.
#[derive(Debug, Clone)]
pub struct SpectrumGenerator<T: Real> {
    pub lambda: T::C,
    pub k: usize,
}

/// A point of the operator spectrum with the multi-index that produced it.
#[derive(Debug, Clone)]
pub struct SpectrumPoint<T: Real> {
    pub z: T::C,
    pub gens: Vec<SpectrumGenerator<T>>,
}

/// The operator spectrum inside a disk, with the admissible eigenvalues
/// and the spectral abscissa a0 = -Re of the k = 0 point.
#[derive(Debug, Clone)]
pub struct SpectrumReport<T: Real> {
    pub points: Vec<SpectrumPoint<T>>,
    pub admissible: Vec<AdmissibleEig<T>>,
    pub a0: T,
    pub radius: T,
    pub sector: Sector<T>,
}

impl<T: Real> SpectrumReport<T> {
    /// JSON value with the documented field layout.
    pub fn to_json(&self) -> serde_json::Value {
        let f = |x: T| x.to_f64().unwrap();
        serde_json::json!({
            "points": self.points.iter().map(|p| serde_json::json!({
                "re": f(p.z.re()),
                "im": f(p.z.im()),
                "gens": p.gens.iter().map(|g| serde_json::json!({
                    "lambda_re": f(g.lambda.re()),
                    "lambda_im": f(g.lambda.im()),
                    "k": g.k,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "a0": f(self.a0),
            "radius": f(self.radius),
            "boundary_eigenvalues": self.admissible.iter().filter(|a| a.on_boundary)
                .map(|a| serde_json::json!({"re": f(a.lambda.re()), "im": f(a.lambda.im())}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Admissible Hamilton eigenvalues of an elliptic form with sector range.
pub(crate) fn admissible_eigs<T: Real>(
    form: &ComplexQuadraticForm<T>,
) -> Result<(Vec<AdmissibleEig<T>>, Sector<T>)> {
    let cert = check_elliptic(form)?;
    if !cert.elliptic {
        return Err(Error::Hypothesis(
            "form is not elliptic: the spectrum formula does not apply".into(),
        ));
    }
    let sector = numerical_range(form)?;
    if sector.kind == SectorKind::FullPlane {
        return Err(Error::Hypothesis(
            "numerical range is the full plane; no sector spectrum".into(),
        ));
    }
    let eigs = hamilton_spectrum(&hamilton_map(form))?;
    let atol = tol::scaled::<T>(tol::ADMISSIBLE_ANGLE);
    let mut adm = Vec::new();
    for e in eigs {
        let minus_i_lambda = e.lambda * T::c(T::zero(), -T::one());
        let theta = arg::<T>(minus_i_lambda);
        if sector.contains_angle(theta, atol) {
            let u = sector.unwrapped(theta);
            let on_boundary =
                rabs(u - sector.theta_min) <= atol || rabs(sector.theta_max - u) <= atol;
            adm.push(AdmissibleEig {
                lambda: e.lambda,
                r: e.r,
                on_boundary,
            });
        }
    }
    Ok((adm, sector))
}

/// Enumerate the operator spectrum inside |z| <= radius.
///
/// Every point is z = sum (r_lambda + 2 k_lambda)(-i lambda) over the
/// admissible eigenvalues; the enumeration is bounded by projecting onto
/// the sector bisector, along which every admissible -i lambda has a
/// strictly positive component.
pub fn operator_spectrum<T: Real>(
    form: &ComplexQuadraticForm<T>,
    radius: T,
) -> Result<SpectrumReport<T>> {
    if radius <= T::zero() {
        return Err(Error::Parse("radius must be positive".into()));
    }
    let (adm, sector) = admissible_eigs(form)?;
    let dirs: Vec<T::C> = adm
        .iter()
        .map(|a| a.lambda * T::c(T::zero(), -T::one()))
        .collect();
    let phi = (sector.theta_min + sector.theta_max) * T::lit(0.5);
    let bis = crate::scalar::dir::<T>(phi);
    let proj = |z: T::C| z.re() * bis.re() + z.im() * bis.im();

    let mut z0 = T::c(T::zero(), T::zero());
    for (a, d) in adm.iter().zip(&dirs) {
        z0 += d.mul_real(T::lit(a.r as f64));
    }
    let a0 = -z0.re();

    let mut points: Vec<SpectrumPoint<T>> = Vec::new();
    let slack = radius * tol::scaled::<T>(1e-12) + tol::scaled::<T>(1e-12);
    if !adm.is_empty() {
        for d in &dirs {
            if proj(*d) <= T::zero() {
                return Err(Error::Indeterminate(
                    "an admissible direction has nonpositive bisector projection; \
                     enumeration cannot be bounded"
                        .into(),
                ));
            }
        }
        let mut ks = vec![0usize; adm.len()];
        enumerate(&dirs, &adm, z0, radius + slack, &proj, 0, &mut ks, &mut points);
    }
    points.sort_by(|a, b| {
        (a.z.abs(), arg::<T>(a.z))
            .partial_cmp(&(b.z.abs(), arg::<T>(b.z)))
            .unwrap()
    });
    // resonant multi-indices can land on the same point; merge their
    // generator lists so each z appears once
    let mtol = tol::scaled::<T>(1e-10);
    let mut merged: Vec<SpectrumPoint<T>> = Vec::new();
    for p in points {
        match merged
            .last_mut()
            .filter(|m| (m.z - p.z).abs() <= mtol * (T::one() + p.z.abs()))
        {
            Some(m) => m.gens.extend(p.gens),
            None => merged.push(p),
        }
    }
    Ok(SpectrumReport {
        points: merged,
        admissible: adm,
        a0,
        radius,
        sector,
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate<T: Real>(
    dirs: &[T::C],
    adm: &[AdmissibleEig<T>],
    partial: T::C,
    radius: T,
    proj: &dyn Fn(T::C) -> T,
    idx: usize,
    ks: &mut Vec<usize>,
    out: &mut Vec<SpectrumPoint<T>>,
) {
    if idx == dirs.len() {
        if partial.abs() <= radius {
            out.push(SpectrumPoint {
                z: partial,
                gens: adm
                    .iter()
                    .zip(ks.iter())
                    .map(|(a, &k)| SpectrumGenerator { lambda: a.lambda, k })
                    .collect(),
            });
        }
        return;
    }
    let mut k = 0usize;
    loop {
        let z = partial + dirs[idx].mul_real(T::lit(2.0 * k as f64));
        // bisector projection grows monotonically in k; once it passes the
        // radius no larger k can re-enter the disk
        if proj(z) > radius {
            break;
        }
        ks[idx] = k;
        enumerate(dirs, adm, z, radius, proj, idx + 1, ks, out);
        k += 1;
    }
    ks[idx] = 0;
}

/// Decay data for e^{t q^w}: the spectral abscissa a0 and, in the
/// non-nilpotent case, the constant-free oscillator rate lambda_1.
#[derive(Debug, Clone)]
pub struct DecayRate<T: Real> {
    pub a0: T,
    pub oscillator_rate: Option<T>,
}

/// Decay rate of the semigroup: a0 from the spectrum formula, plus the
/// constant-free rate lambda_1 when the real part is non-nilpotent.
///
/// Requires an elliptic form with Re q <= 0 and Re q not identically zero
/// (a vanishing real part generates a unitary group with no decay).
pub fn decay_rate<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<DecayRate<T>> {
    let class = classify_real_part(form)?;
    if class.kind == RealPartKind::Zero {
        return Err(Error::Hypothesis(
            "Re q vanishes identically: the evolution is unitary and has no decay rate"
                .into(),
        ));
    }
    let (adm, _) = admissible_eigs(form)?;
    let mut a0 = T::zero();
    for a in &adm {
        let minus_i_lambda = a.lambda * T::c(T::zero(), -T::one());
        a0 += T::lit(a.r as f64) * (-minus_i_lambda.re());
    }
    if a0 <= tol::scaled::<T>(tol::ELLIPTIC) * (T::one() + form.norm()) {
        return Err(Error::Indeterminate(format!(
            "spectral abscissa {a0:e} is not positive; inconsistent with decay under \
             the stated hypotheses"
        )));
    }
    let oscillator_rate = match class.kind {
        RealPartKind::NonNilpotent => Some(class.lambdas[0]),
        _ => None,
    };
    Ok(DecayRate {
        a0,
        oscillator_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cluster_merges_nearby_values() {
        let eigs = vec![
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(1.0 + 1e-12, 0.0),
            num_complex::Complex64::new(-1.0, 0.0),
        ];
        let groups = cluster::<f64>(&eigs, 1e-9);
        assert_eq!(groups.len(), 2);
    }
}
