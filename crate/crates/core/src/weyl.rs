//! Finite Hermite-basis compressions of quantized quadratic symbols.
//!
//! A quadratic symbol quantizes to the symmetrized product of position and
//! momentum generators, and both act on the tensor Hermite basis through
//! two-term ladder recurrences with closed-form coefficients. Matrix entries
//! are therefore exact: intermediate vectors are kept at full degree and only
//! the final projection drops components above the cutoff, so the truncation
//! at degree N is literally the leading block of any larger truncation.

use crate::error::{Error, Result};
use crate::form::ComplexQuadraticForm;
use crate::scalar::{rsqrt, Real};
use ndarray::prelude::*;
use ndarray_linalg::Scalar;
use std::collections::HashMap;

/// Compression of a quantized symbol onto Hermite functions of total degree
/// at most `degree`, in the graded basis (degree-major, then lexicographic).
#[derive(Debug, Clone)]
pub struct TruncatedOperator<T: Real> {
    /// Number of space variables of the underlying symbol.
    pub n: usize,
    /// Largest total Hermite degree retained.
    pub degree: usize,
    /// Dense matrix acting on the graded basis.
    pub matrix: Array2<T::C>,
}

impl<T: Real> TruncatedOperator<T> {
    /// Number of retained basis functions.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Number of multi-indices in `n` variables of total degree at most `degree`.
pub fn basis_dim(n: usize, degree: usize) -> usize {
    // binomial(degree + n, n), exact because every partial product is itself
    // a binomial coefficient
    let mut acc: usize = 1;
    for k in 1..=n {
        acc = acc * (degree + k) / k;
    }
    acc
}

/// All multi-indices with |alpha| <= degree, ordered by total degree and
/// lexicographically within each degree.
pub(crate) fn graded_indices(n: usize, degree: usize) -> Vec<Vec<usize>> {
    fn fill(n: usize, prefix: &mut Vec<usize>, left: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            fill(n, prefix, left - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(basis_dim(n, degree));
    let mut prefix = Vec::with_capacity(n);
    for d in 0..=degree {
        fill(n, &mut prefix, d, &mut out);
    }
    out
}

/// Action of the w-th phase-space generator on the Hermite function with
/// multi-index `alpha`: position variables for w < n, momentum for w >= n.
/// Each term carries its magnitude as the integer m of sqrt(m/2) and an
/// exact unit phase, so that two-step path coefficients can be formed under
/// a single square root: sqrt(m1/2)·sqrt(m2/2) = sqrt(m1·m2)/2. Diagonal
/// paths (m1 = m2) then come out exactly rational, which keeps the
/// oscillator truncation exactly diagonal. Returns the raised term first.
fn ladder_terms<T: Real>(w: usize, n: usize, alpha: &[usize]) -> Vec<(Vec<usize>, usize, T::C)> {
    let j = if w < n { w } else { w - n };
    let aj = alpha[j];
    let one = T::c(T::one(), T::zero());
    let i_up = T::c(T::zero(), T::one());
    let i_down = T::c(T::zero(), -T::one());
    let mut terms = Vec::with_capacity(2);
    let mut raised = alpha.to_vec();
    raised[j] += 1;
    terms.push((raised, aj + 1, if w < n { one } else { i_up }));
    if aj > 0 {
        let mut lowered = alpha.to_vec();
        lowered[j] -= 1;
        terms.push((lowered, aj, if w < n { one } else { i_down }));
    }
    terms
}

fn max_dim() -> usize {
    std::env::var("QSEMI_MAX_DIM")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(20_000)
}

/// Matrix of the quantized symbol on Hermite functions of degree <= `degree`.
///
/// Entries are assembled from exact ladder coefficients; no quadrature is
/// involved. Requires `degree >= 2` so that the quadratic coupling is
/// represented at all; the basis size is capped by the `QSEMI_MAX_DIM`
/// environment variable (default 20000).
pub fn weyl_matrix<T: Real>(
    form: &ComplexQuadraticForm<T>,
    degree: usize,
) -> Result<TruncatedOperator<T>> {
    if degree < 2 {
        return Err(Error::Parse(format!(
            "truncation degree must be at least 2, got {degree}"
        )));
    }
    let n = form.n();
    let dim = basis_dim(n, degree);
    let cap = max_dim();
    if dim > cap {
        return Err(Error::Limit(format!(
            "basis dimension {dim} exceeds the cap {cap} (QSEMI_MAX_DIM)"
        )));
    }
    let indices = graded_indices(n, degree);
    let lookup: HashMap<&[usize], usize> = indices
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_slice(), i))
        .collect();
    let q = form.matrix();
    let zero = T::c(T::zero(), T::zero());
    let mut matrix = Array2::from_elem((dim, dim), zero);
    for (col, alpha) in indices.iter().enumerate() {
        // the symbol matrix is symmetric, so summing Q_uv w_u w_v over all
        // ordered pairs is already the symmetrized (Weyl) product
        let mut acc: HashMap<Vec<usize>, T::C> = HashMap::new();
        for u in 0..2 * n {
            for v in 0..2 * n {
                let quv = q[[u, v]];
                if quv.abs() == T::zero() {
                    continue;
                }
                for (beta, m1, ph1) in ladder_terms::<T>(v, n, alpha) {
                    for (gamma, m2, ph2) in ladder_terms::<T>(u, n, &beta) {
                        let mag = rsqrt(T::lit((m1 * m2) as f64)) * T::lit(0.5);
                        let coeff = quv * ph1 * ph2 * T::c(mag, T::zero());
                        *acc.entry(gamma).or_insert(zero) += coeff;
                    }
                }
            }
        }
        for (gamma, val) in acc {
            if gamma.iter().sum::<usize>() <= degree {
                let row = lookup[gamma.as_slice()];
                matrix[[row, col]] += val;
            }
        }
    }
    Ok(TruncatedOperator { n, degree, matrix })
}

/// Residual of the parabolic scaling identity at symbol level: substituting
/// x -> sqrt(h) x, xi -> sqrt(h) xi and dividing by h must reproduce the
/// coefficient matrix. Returns the largest absolute deviation (zero for
/// h = 1, rounding-level otherwise).
pub fn scaling_identity_check<T: Real>(form: &ComplexQuadraticForm<T>, h: T) -> Result<T> {
    if !(h > T::zero() && h <= T::one()) {
        return Err(Error::Parse(
            "scaling parameter must satisfy 0 < h <= 1".into(),
        ));
    }
    let d = 2 * form.n();
    let root = T::c(rsqrt(h), T::zero());
    let hc = T::c(h, T::zero());
    let q = form.matrix();
    let mut worst = T::zero();
    for i in 0..d {
        for j in 0..d {
            let scaled = q[[i, j]] * root * root / hc;
            let dev = (scaled - q[[i, j]]).abs();
            if dev > worst {
                worst = dev;
            }
        }
    }
    Ok(worst)
}
