//! Splitting off the real-eigenvalue subspace of the Hamilton map.
//!
//! When the Hamilton map of an elliptic form has real eigenvalues, the
//! phase space factors symplectically into a subspace S, on which the form
//! is i*epsilon times a positive oscillator sum, and its sigma-orthogonal
//! complement, on which the restricted form has a Hamilton map free of real
//! eigenvalues. This module computes that factorization and the restricted
//! form.

use crate::error::{Error, Result};
use crate::form::{frob_real, ComplexQuadraticForm};
use crate::hamilton::{hamilton_map, j_real, sigma};
use crate::normal_form::reduce;
use crate::scalar::{rabs, rsqrt, Real};
use crate::sector::check_elliptic;
use crate::tol;
use ndarray::prelude::*;
use ndarray_linalg::{Eig, Inverse, Scalar, SVD};
use num_traits::Float;

/// Symplectic factorization of phase space along the real Hamilton
/// eigenvalues.
#[derive(Debug, Clone)]
pub struct Tensorization<T: Real> {
    /// Symplectic basis of S, columns [e_1..e_r | eps_1..eps_r]; on this
    /// basis q is i*epsilon*sum mu_j (x_j^2 + xi_j^2).
    pub s_basis: Array2<T>,
    /// Symplectic basis of the sigma-orthogonal complement of S, columns
    /// [f_1..f_{n'} | phi_1..phi_{n'}].
    pub sperp_basis: Array2<T>,
    /// The form restricted to the complement, expressed on `sperp_basis`.
    pub q_tilde: ComplexQuadraticForm<T>,
    /// Oscillator frequencies on S, descending.
    pub mu: Vec<T>,
    /// Sign such that epsilon * Im q is positive definite on S (+1 when S
    /// is trivial).
    pub epsilon: T,
}

impl<T: Real> Tensorization<T> {
    pub fn r(&self) -> usize {
        self.s_basis.ncols() / 2
    }

    /// The full change of coordinates [S e's, complement f's | S eps's,
    /// complement phi's]; symplectic, and block-diagonalizes q.
    pub fn combined_symplectic(&self) -> Array2<T> {
        let r = self.r();
        let np = self.sperp_basis.ncols() / 2;
        let n = r + np;
        let mut m = Array2::<T>::zeros((2 * n, 2 * n));
        for i in 0..r {
            m.column_mut(i).assign(&self.s_basis.column(i));
            m.column_mut(n + i).assign(&self.s_basis.column(r + i));
        }
        for i in 0..np {
            m.column_mut(r + i).assign(&self.sperp_basis.column(i));
            m.column_mut(n + r + i).assign(&self.sperp_basis.column(np + i));
        }
        m
    }
}

/// Split phase space along the real eigenvalues of the Hamilton map.
///
/// Fails with `Hypothesis` when the form is not elliptic or Im q is not
/// definite on the real-eigenvalue subspace, and with `Indeterminate` when
/// the numerical subspace extraction cannot be certified.
pub fn split_real_eigenspaces<T: Real>(form: &ComplexQuadraticForm<T>) -> Result<Tensorization<T>> {
    check_elliptic(form)?;
    let n = form.n();
    let f = hamilton_map(form);
    let tolr = tol::scaled::<T>(tol::SPECTRAL) * (T::one() + f.norm());
    let (eigs, vecs) = f.matrix().eig().map_err(Error::Backend)?;

    // collect eigenvectors of positive real eigenvalues
    let mut stacked: Vec<Array1<T>> = Vec::new();
    let mut r = 0usize;
    for (idx, lam) in eigs.iter().enumerate() {
        if rabs(lam.im()) > tolr {
            continue;
        }
        if rabs(lam.re()) <= tolr {
            return Err(Error::Hypothesis(
                "Hamilton map has an eigenvalue at zero; the form is not elliptic".into(),
            ));
        }
        if lam.re() < T::zero() {
            continue;
        }
        r += 1;
        let v = vecs.column(idx);
        stacked.push(v.mapv(|z| z.re()));
        stacked.push(v.mapv(|z| z.im()));
    }

    if r == 0 {
        // nothing to split off: S is trivial and the restriction is q itself
        return Ok(Tensorization {
            s_basis: Array2::zeros((2 * n, 0)),
            sperp_basis: Array2::eye(2 * n),
            q_tilde: form.clone(),
            mu: Vec::new(),
            epsilon: T::one(),
        });
    }

    // orthonormal basis of S = span of the stacked parts, rank must be 2r
    let mut m = Array2::<T>::zeros((2 * n, stacked.len()));
    for (j, col) in stacked.iter().enumerate() {
        m.column_mut(j).assign(col);
    }
    let (u, sv, _) = m.svd(true, false).map_err(Error::Backend)?;
    let u = u.expect("left singular vectors requested");
    let smax = sv.iter().fold(T::zero(), |a, &b| Float::max(a, b));
    let rank_tol = tol::scaled::<T>(tol::SPECTRAL) * (T::one() + smax);
    let rank = sv.iter().filter(|&&s| s > rank_tol).count();
    if rank != 2 * r {
        return Err(Error::Indeterminate(format!(
            "real-eigenvalue subspace has numerical dimension {rank}, expected {}",
            2 * r
        )));
    }
    let b_s = u.slice(s![.., ..2 * r]).to_owned();

    // the real part of the Hamilton map must annihilate S
    let refm = f.re();
    let leak = frob_real(&refm.dot(&b_s));
    if leak > tolr {
        return Err(Error::Indeterminate(format!(
            "Re F does not annihilate the real-eigenvalue subspace: residual {leak:e}"
        )));
    }

    // sign of Im q on S
    let im_q = form.im_matrix();
    let on_s = b_s.t().dot(&im_q).dot(&b_s);
    let (ev, _) = on_s
        .view()
        .eig()
        .map_err(Error::Backend)?;
    let def_tol = tol::scaled::<T>(tol::SPECTRAL) * (T::one() + form.norm());
    let epsilon = if ev.iter().all(|z| z.re() > def_tol) {
        T::one()
    } else if ev.iter().all(|z| z.re() < -def_tol) {
        -T::one()
    } else {
        return Err(Error::Hypothesis(
            "Im q is not definite on the real-eigenvalue subspace".into(),
        ));
    };

    // sigma-projection onto S along its sigma-orthogonal complement
    let j = j_real::<T>(n);
    let gram = b_s.t().dot(&j).dot(&b_s);
    let gram_inv = gram.inv().map_err(|_| {
        Error::Indeterminate("real-eigenvalue subspace is sigma-degenerate".into())
    })?;
    let proj = b_s.dot(&gram_inv).dot(&b_s.t()).dot(&j);

    // oscillator reduction of epsilon * Im q concentrated on S
    let scaled_im = im_q.mapv(|v| v * epsilon);
    let a_osc_raw = proj.t().dot(&scaled_im).dot(&proj);
    let a_osc = (&a_osc_raw + &a_osc_raw.t()) * T::lit(0.5);
    let thr_osc = tol::scaled::<T>(tol::SPECTRAL) * (T::one() + frob_real(&a_osc));
    let red = reduce(&a_osc, thr_osc, true)?;
    if red.osc.len() != r {
        return Err(Error::Indeterminate(format!(
            "oscillator reduction on S found {} pairs, expected {r}",
            red.osc.len()
        )));
    }
    let mu: Vec<T> = red.osc.iter().map(|p| p.mu).collect();
    let mut s_basis = Array2::<T>::zeros((2 * n, 2 * r));
    for (i, pair) in red.osc.iter().enumerate() {
        s_basis.column_mut(i).assign(&pair.e);
        s_basis.column_mut(r + i).assign(&pair.eps);
    }

    // complement: z is sigma-orthogonal to S iff J z is Euclidean-orthogonal
    // to S, so J maps the orthonormal complement of S onto it
    let np = n - r;
    let b_perp = j.dot(&u.slice(s![.., 2 * r..]).to_owned());
    let sperp_basis = symplectic_gram_schmidt(&b_perp, np)?;

    // restriction of q to the complement in its symplectic basis
    let sp_c = sperp_basis.mapv(|v| T::c(v, T::zero()));
    let q_res = sp_c.t().dot(form.matrix()).dot(&sp_c);
    let q_tilde = ComplexQuadraticForm::resymmetrized(np, q_res)?;

    // the restriction must be free of real Hamilton eigenvalues
    if np > 0 {
        let ft = hamilton_map(&q_tilde);
        let tolt = tol::scaled::<T>(tol::SPECTRAL) * (T::one() + ft.norm());
        let (res_eigs, _) = ft.matrix().eig().map_err(Error::Backend)?;
        if res_eigs.iter().any(|z| rabs(z.im()) <= tolt) {
            return Err(Error::Indeterminate(
                "restricted form still has real Hamilton eigenvalues".into(),
            ));
        }
    }

    let t = Tensorization {
        s_basis,
        sperp_basis,
        q_tilde,
        mu,
        epsilon,
    };

    // the combined basis must be symplectic
    let m = t.combined_symplectic();
    let gram_dev = (&m.t().dot(&j).dot(&m) - &j)
        .iter()
        .fold(T::zero(), |a, &v| Float::max(a, rabs(v)));
    let scale = T::one() + frob_real(&m) * frob_real(&m);
    if gram_dev > tol::scaled::<T>(tol::SPECTRAL) * scale {
        return Err(Error::Indeterminate(format!(
            "combined splitting basis is not symplectic: deviation {gram_dev:e}"
        )));
    }
    Ok(t)
}

/// Build a symplectic basis [f_1..f_m | phi_1..phi_m] of the span of the
/// (orthonormal) columns of `pool` via sigma-orthogonal pair extraction.
fn symplectic_gram_schmidt<T: Real>(pool: &Array2<T>, m: usize) -> Result<Array2<T>> {
    let d = pool.nrows();
    let mut work: Vec<Array1<T>> = pool.columns().into_iter().map(|c| c.to_owned()).collect();
    let mut fs: Vec<Array1<T>> = Vec::with_capacity(m);
    let mut phis: Vec<Array1<T>> = Vec::with_capacity(m);
    for _ in 0..m {
        // take the largest remaining vector as f
        work.sort_by(|a, b| {
            a.dot(a)
                .partial_cmp(&b.dot(b))
                .expect("vector norms are finite")
        });
        let f = match work.pop() {
            Some(v) => {
                let nn = rsqrt(v.dot(&v));
                if !(nn > T::lit(1e-10)) {
                    return Err(Error::Indeterminate(
                        "symplectic basis construction ran out of independent directions".into(),
                    ));
                }
                v.mapv(|x| x / nn)
            }
            None => {
                return Err(Error::Indeterminate(
                    "symplectic basis construction ran out of candidate vectors".into(),
                ));
            }
        };
        // partner with the largest symplectic pairing against f
        let mut best_idx = None;
        let mut best_s = T::zero();
        for (i, w) in work.iter().enumerate() {
            let s = sigma(&w.view(), &f.view());
            if rabs(s) > rabs(best_s) {
                best_s = s;
                best_idx = Some(i);
            }
        }
        let idx = best_idx.ok_or_else(|| {
            Error::Indeterminate("no symplectic partner available in the complement".into())
        })?;
        if !(rabs(best_s) > T::lit(1e-10)) {
            return Err(Error::Indeterminate(
                "complement is sigma-degenerate; cannot build a symplectic basis".into(),
            ));
        }
        let partner = work.swap_remove(idx);
        let phi = partner.mapv(|x| x / best_s);
        // project the remaining vectors onto the sigma-complement of (f, phi)
        for w in work.iter_mut() {
            let sw_phi = sigma(&w.view(), &phi.view());
            let sw_f = sigma(&w.view(), &f.view());
            let adj = &f * sw_phi - &phi * sw_f;
            *w += &adj;
        }
        fs.push(f);
        phis.push(phi);
    }
    let mut out = Array2::<T>::zeros((d, 2 * m));
    for (i, f) in fs.iter().enumerate() {
        out.column_mut(i).assign(f);
    }
    for (i, phi) in phis.iter().enumerate() {
        out.column_mut(m + i).assign(phi);
    }
    Ok(out)
}
