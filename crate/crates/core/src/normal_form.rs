//! Symplectic normal form of the nonpositive real part of a form.
//!
//! For A = -Re Q positive semidefinite there is a real symplectic matrix
//! chi with chi^T A chi block-diagonal: k oscillator blocks
//! lambda_j (x_j^2 + xi_j^2), l rank-one blocks x_j^2, and a kernel. The
//! construction extracts one symplectic pair (e, eps) at a time and
//! deflates onto the sigma-complement, so every intermediate object is
//! verifiable; the result is checked against both defining invariants
//! before it is returned.

use crate::error::{Error, Result};
use crate::form::{frob_real, ComplexQuadraticForm};
use crate::hamilton::{j_complex, j_real, sigma};
use crate::scalar::{rabs, rsqrt, Real};
use crate::spectral::negative_real_part;
use crate::tol;
use ndarray::prelude::*;
use ndarray_linalg::{Eigh, Scalar, UPLO};
use num_traits::Float;

/// Symplectic change of coordinates normalizing -Re q.
#[derive(Debug, Clone)]
pub struct NormalForm<T: Real> {
    /// Columns are the new basis: [e_1..e_n | eps_1..eps_n].
    pub chi: Array2<T>,
    /// Oscillator block count.
    pub k: usize,
    /// Rank-one block count.
    pub l: usize,
    /// Oscillator frequencies, descending.
    pub lambdas: Vec<T>,
}

impl<T: Real> NormalForm<T> {
    pub fn n(&self) -> usize {
        self.chi.nrows() / 2
    }

    /// The target coefficient matrix: lambda_j on the paired diagonal
    /// entries for oscillator blocks, 1 on the x_j entry for rank-one
    /// blocks, 0 elsewhere.
    pub fn normal_matrix(&self) -> Array2<T> {
        let n = self.n();
        let mut d = Array2::zeros((2 * n, 2 * n));
        for (j, lam) in self.lambdas.iter().enumerate() {
            d[[j, j]] = *lam;
            d[[n + j, n + j]] = *lam;
        }
        for j in self.k..self.k + self.l {
            d[[j, j]] = T::one();
        }
        d
    }
}

/// One extracted symplectic pair: sigma(eps, e) = 1 and the quadratic form
/// being reduced takes the value mu on both e and eps (0 for kernel pairs).
pub(crate) struct Pair<T: Real> {
    pub e: Array1<T>,
    pub eps: Array1<T>,
    pub mu: T,
}

/// The outcome of the pairwise reduction of a PSD form.
pub(crate) struct Reduction<T: Real> {
    pub osc: Vec<Pair<T>>,
    pub rank1: Vec<Pair<T>>,
    pub kernel: Vec<Pair<T>>,
}

/// Symmetric PSD square root, rank-clamped: eigenvalues below the rank
/// threshold are zeroed rather than rooted, since the square root would
/// amplify eigenvalue noise eps to sqrt(eps) and fake oscillator
/// frequencies far above the working precision.
fn psd_sqrt<T: Real>(a: &Array2<T>, thr: T) -> Result<Array2<T>> {
    let (w, v) = a.eigh(UPLO::Lower).map_err(Error::Backend)?;
    let mut vs = v.clone();
    for (j, mut col) in vs.columns_mut().into_iter().enumerate() {
        let s = if w[j] > thr { rsqrt(w[j]) } else { T::zero() };
        col *= s;
    }
    Ok(vs.dot(&v.t()))
}

/// sigma-projection deflating a pair out: P z = z + sigma(z,eps) e - sigma(z,e) eps,
/// which maps onto the sigma-complement of span(e, eps).
fn deflate<T: Real>(
    a: &mut Array2<T>,
    pcum: &mut Array2<T>,
    j: &Array2<T>,
    e: &Array1<T>,
    eps: &Array1<T>,
) {
    let d = a.nrows();
    let je = j.dot(e);
    let jeps = j.dot(eps);
    let mut p = Array2::<T>::eye(d);
    for i in 0..d {
        for c in 0..d {
            p[[i, c]] += eps[i] * je[c] - e[i] * jeps[c];
        }
    }
    let next = p.t().dot(&*a).dot(&p);
    // resymmetrize to kill drift
    *a = (&next + &next.t()) * T::lit(0.5);
    *pcum = p.dot(&*pcum);
}

/// Value of the form a on (x, y).
fn quad<T: Real>(a: &Array2<T>, x: &Array1<T>, y: &Array1<T>) -> T {
    x.dot(&a.dot(y))
}

fn norm2<T: Real>(x: &Array1<T>) -> T {
    x.dot(x)
}

/// Reduce a PSD quadratic form to symplectic pairs.
///
/// Extracts oscillator pairs (from purely imaginary eigenvalue pairs of
/// J·A via the Hermitian matrix -i A^{1/2} J A^{1/2}) in descending
/// frequency order, then rank-one pairs, then completes a symplectic basis
/// of the remaining kernel. With `oscillators_only` the reduction stops
/// after the oscillator stage (the caller owns the rest of the space).
pub(crate) fn reduce<T: Real>(
    a0: &Array2<T>,
    thr: T,
    oscillators_only: bool,
) -> Result<Reduction<T>> {
    let d = a0.nrows();
    let n = d / 2;
    let j = j_real::<T>(n);
    let jc = j_complex::<T>(n);
    let mut a = a0.clone();
    let mut pcum = Array2::<T>::eye(d);
    let mut osc: Vec<Pair<T>> = Vec::new();
    let mut rank1: Vec<Pair<T>> = Vec::new();
    let mut kernel: Vec<Pair<T>> = Vec::new();

    for _ in 0..n {
        if frob_real(&a) <= thr {
            break;
        }
        let half = psd_sqrt(&a, thr)?;
        let skew = half.dot(&j).dot(&half);
        let herm = skew.mapv(|x| T::c(T::zero(), -x));
        let (mu, vecs) = herm.eigh(UPLO::Lower).map_err(Error::Backend)?;
        let top = mu[mu.len() - 1];
        if top > thr {
            // oscillator pair: lift the top eigenvector through J A^{1/2}
            let x = vecs.column(vecs.ncols() - 1);
            let half_c = half.mapv(|v| T::c(v, T::zero()));
            let w = jc.dot(&half_c.dot(&x));
            let u = w.mapv(|z| z.re());
            let v = w.mapv(|z| z.im());
            // orthonormal frame of the invariant plane
            let b1 = &u / rsqrt(norm2(&u));
            let mut b2 = &v - &(&b1 * b1.dot(&v));
            let b2n = rsqrt(norm2(&b2));
            if !(b2n > thr) {
                return Err(Error::Indeterminate(
                    "degenerate oscillator plane during normal-form reduction".into(),
                ));
            }
            b2 /= b2n;
            // canonical phase: align e with the dominant coordinate axis
            let mut best = 0usize;
            let mut best_val = -T::one();
            for i in 0..d {
                let val = b1[i] * b1[i] + b2[i] * b2[i];
                if val > best_val {
                    best_val = val;
                    best = i;
                }
            }
            let proj = &b1 * b1[best] + &b2 * b2[best];
            let c = quad(&a, &proj, &proj);
            if !(c > T::zero()) {
                return Err(Error::Indeterminate(
                    "oscillator plane misaligned with the form during reduction".into(),
                ));
            }
            let e = &proj * rsqrt(top / c);
            let eps = j.dot(&a.dot(&e)).mapv(|x| -x / top);
            deflate(&mut a, &mut pcum, &j, &e, &eps);
            osc.push(Pair { e, eps, mu: top });
        } else if oscillators_only {
            break;
        } else {
            // rank-one pair: top eigenvector of the residual form
            let (w, v) = a.eigh(UPLO::Lower).map_err(Error::Backend)?;
            let top = w[w.len() - 1];
            if top <= thr {
                break;
            }
            let mut e = v.column(v.ncols() - 1).to_owned();
            let mut am = 0usize;
            for i in 0..d {
                if rabs(e[i]) > rabs(e[am]) {
                    am = i;
                }
            }
            if e[am] < T::zero() {
                e = -e;
            }
            e /= rsqrt(top);
            let eps = j.dot(&a.dot(&e)).mapv(|x| -x);
            deflate(&mut a, &mut pcum, &j, &e, &eps);
            rank1.push(Pair {
                e,
                eps,
                mu: T::one(),
            });
        }
    }

    if frob_real(&a) > thr * T::lit(10.0) && !oscillators_only {
        return Err(Error::Indeterminate(
            "normal-form reduction did not exhaust the form within the iteration cap".into(),
        ));
    }

    if !oscillators_only {
        // complete a symplectic basis of the residual kernel
        let m = n - osc.len() - rank1.len();
        for _ in 0..m {
            let mut e = Array1::<T>::zeros(d);
            let mut best = T::zero();
            for i in 0..d {
                let cand = pcum.column(i).to_owned();
                let nn = rsqrt(norm2(&cand));
                if nn > best {
                    best = nn;
                    e = cand;
                }
            }
            if !(best > T::lit(1e-8)) {
                return Err(Error::Indeterminate(
                    "symplectic completion found no residual direction".into(),
                ));
            }
            e.mapv_inplace(|x| x / best);
            let mut partner = Array1::<T>::zeros(d);
            let mut s_best = T::zero();
            for i in 0..d {
                let cand = pcum.column(i).to_owned();
                let s = sigma(&cand.view(), &e.view());
                if rabs(s) > rabs(s_best) {
                    s_best = s;
                    partner = cand;
                }
            }
            if !(rabs(s_best) > T::lit(1e-10)) {
                return Err(Error::Indeterminate(
                    "residual space is sigma-degenerate; cannot complete a symplectic basis"
                        .into(),
                ));
            }
            let eps = partner.mapv(|x| x / s_best);
            deflate(&mut a, &mut pcum, &j, &e, &eps);
            kernel.push(Pair {
                e,
                eps,
                mu: T::zero(),
            });
        }
    }

    Ok(Reduction { osc, rank1, kernel })
}

/// Symplectic normal form of -Re q for a form with Re Q negative
/// semidefinite. The returned chi satisfies chi^T J chi = J and
/// chi^T (-Re Q) chi = the block-diagonal normal matrix; both identities
/// are verified before returning.
pub fn symplectic_normal_form<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<NormalForm<T>> {
    let (a, thr) = negative_real_part(form)?;
    let n = form.n();
    let red = reduce(&a, thr, false)?;
    let k = red.osc.len();
    let l = red.rank1.len();
    let lambdas: Vec<T> = red.osc.iter().map(|p| p.mu).collect();

    let mut chi = Array2::<T>::zeros((2 * n, 2 * n));
    let pairs = red.osc.iter().chain(&red.rank1).chain(&red.kernel);
    for (col, pair) in pairs.enumerate() {
        chi.column_mut(col).assign(&pair.e);
        chi.column_mut(n + col).assign(&pair.eps);
    }

    let nf = NormalForm { chi, k, l, lambdas };

    // verify both defining invariants before handing the result out
    let j = j_real::<T>(n);
    let scale = T::one() + frob_real(&nf.chi) * frob_real(&nf.chi);
    let gram_dev = max_abs(&(&nf.chi.t().dot(&j).dot(&nf.chi) - &j));
    if gram_dev > tol::scaled::<T>(tol::SPECTRAL) * scale {
        return Err(Error::Indeterminate(format!(
            "normal-form basis is not symplectic: |chi^T J chi - J| = {gram_dev:e}"
        )));
    }
    let transformed = nf.chi.t().dot(&a).dot(&nf.chi);
    let form_dev = max_abs(&(&transformed - &nf.normal_matrix()));
    if form_dev > tol::scaled::<T>(1e-8) * scale * (T::one() + frob_real(&a)) {
        return Err(Error::Indeterminate(format!(
            "transformed form misses its normal matrix by {form_dev:e}"
        )));
    }
    Ok(nf)
}

fn max_abs<T: Real>(m: &Array2<T>) -> T {
    m.iter().fold(T::zero(), |acc, &v| Float::max(acc, rabs(v)))
}
