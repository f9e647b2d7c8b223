//! Oracle tests for the spectral layer: Hamilton-map eigenvalues, the
//! classification and symplectic normal form of the real part, the
//! real-eigenvalue splitting, the operator spectrum lattice and decay rates.

use ndarray::prelude::*;
use num_complex::Complex64;
use qsemi::catalog;
use qsemi::form::ComplexQuadraticForm;
use qsemi::hamilton::{hamilton_map, j_real};
use qsemi::normal_form::symplectic_normal_form;
use qsemi::spectral::{
    classify_real_part, decay_rate, hamilton_spectrum, operator_spectrum, RealPartKind,
};
use qsemi::split::split_real_eigenspaces;
use qsemi::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn form(n: usize, entries: &[(usize, usize, Complex64)]) -> ComplexQuadraticForm<f64> {
    let mut q = Array2::zeros((2 * n, 2 * n));
    for &(i, j, v) in entries {
        q[[i, j]] = v;
        q[[j, i]] = v;
    }
    ComplexQuadraticForm::new(n, q).unwrap()
}

fn ho1d() -> ComplexQuadraticForm<f64> {
    catalog::get("ho1d").unwrap()
}

fn nil1d() -> ComplexQuadraticForm<f64> {
    catalog::get("nil1d").unwrap()
}

fn mix2d() -> ComplexQuadraticForm<f64> {
    catalog::get("mix2d").unwrap()
}

/// i(x^2 + xi^2): purely imaginary, elliptic, zero real part.
fn imag_osc() -> ComplexQuadraticForm<f64> {
    form(1, &[(0, 0, c(0.0, 1.0)), (1, 1, c(0.0, 1.0))])
}

fn has_eig(eigs: &[qsemi::spectral::HamiltonEig<f64>], lambda: Complex64, r: usize, tol: f64) -> bool {
    eigs.iter().any(|e| (e.lambda - lambda).norm() <= tol && e.r == r)
}

#[test]
fn oscillator_hamilton_eigenvalues() {
    let eigs = hamilton_spectrum(&hamilton_map(&ho1d())).unwrap();
    assert_eq!(eigs.len(), 2);
    assert!(has_eig(&eigs, c(0.0, 1.0), 1, 1e-12));
    assert!(has_eig(&eigs, c(0.0, -1.0), 1, 1e-12));
}

#[test]
fn shear_hamilton_eigenvalues_are_quartic_roots() {
    // F^2 = (1+i) I, so the eigenvalues are the square roots of 1+i
    let eigs = hamilton_spectrum(&hamilton_map(&nil1d())).unwrap();
    let expected = Complex64::from_polar(2f64.powf(0.25), std::f64::consts::PI / 8.0);
    assert_eq!(eigs.len(), 2);
    assert!(has_eig(&eigs, expected, 1, 1e-10));
    assert!(has_eig(&eigs, -expected, 1, 1e-10));
}

#[test]
fn rotated_zero_real_part_has_real_eigenvalues() {
    let eigs = hamilton_spectrum(&hamilton_map(&imag_osc())).unwrap();
    assert_eq!(eigs.len(), 2);
    assert!(has_eig(&eigs, c(1.0, 0.0), 1, 1e-12));
    assert!(has_eig(&eigs, c(-1.0, 0.0), 1, 1e-12));
}

#[test]
fn repeated_eigenvalues_cluster_with_multiplicity() {
    // two independent oscillators share the eigenvalue pair +-i
    let q = form(
        2,
        &[
            (0, 0, c(-1.0, 0.0)),
            (1, 1, c(-1.0, 0.0)),
            (2, 2, c(-1.0, 0.0)),
            (3, 3, c(-1.0, 0.0)),
        ],
    );
    let eigs = hamilton_spectrum(&hamilton_map(&q)).unwrap();
    assert_eq!(eigs.len(), 2);
    assert!(has_eig(&eigs, c(0.0, 1.0), 2, 1e-10));
    assert!(has_eig(&eigs, c(0.0, -1.0), 2, 1e-10));
    let total: usize = eigs.iter().map(|e| e.r).sum();
    assert_eq!(total, 4);
}

#[test]
fn classify_oscillator_non_nilpotent() {
    let class = classify_real_part(&ho1d()).unwrap();
    assert_eq!(class.kind, RealPartKind::NonNilpotent);
    assert_eq!((class.k, class.l), (1, 0));
    assert!((class.lambdas[0] - 1.0).abs() < 1e-12);
}

#[test]
fn classify_shear_nilpotent() {
    let class = classify_real_part(&nil1d()).unwrap();
    assert_eq!(class.kind, RealPartKind::Nilpotent);
    assert_eq!((class.k, class.l), (0, 1));
    assert!(class.lambdas.is_empty());
}

#[test]
fn classify_zero_real_part() {
    let class = classify_real_part(&imag_osc()).unwrap();
    assert_eq!(class.kind, RealPartKind::Zero);
    assert_eq!((class.k, class.l), (0, 0));
}

#[test]
fn classify_split_pair() {
    let class = classify_real_part(&mix2d()).unwrap();
    assert_eq!(class.kind, RealPartKind::NonNilpotent);
    assert_eq!((class.k, class.l), (1, 0));
    assert!((class.lambdas[0] - 1.0).abs() < 1e-12);
}

#[test]
fn classify_rejects_positive_real_part() {
    // q = x^2 has Re Q with a positive eigenvalue
    let q = form(1, &[(0, 0, c(1.0, 0.0))]);
    let err = classify_real_part(&q).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(_)), "{err}");
}

fn assert_normal_form_invariants(q: &ComplexQuadraticForm<f64>, nf: &qsemi::normal_form::NormalForm<f64>) {
    let n = q.n();
    let j = j_real::<f64>(n);
    let gram = nf.chi.t().dot(&j).dot(&nf.chi);
    let dev = (&gram - &j).iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(dev < 1e-9, "chi^T J chi deviates from J by {dev:e}");
    let a = q.re_matrix().mapv(|v| -v);
    let transformed = nf.chi.t().dot(&a).dot(&nf.chi);
    let target = nf.normal_matrix();
    let dev = (&transformed - &target)
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-8, "transformed real part misses normal form by {dev:e}");
}

#[test]
fn normal_form_oscillator_is_identity() {
    let q = ho1d();
    let nf = symplectic_normal_form(&q).unwrap();
    assert_eq!((nf.k, nf.l), (1, 0));
    assert!((nf.lambdas[0] - 1.0).abs() < 1e-12);
    let dev = (&nf.chi - &Array2::<f64>::eye(2))
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-8, "chi deviates from identity by {dev:e}");
    assert_normal_form_invariants(&q, &nf);
}

#[test]
fn normal_form_rank_one_is_identity() {
    // -Re q = x^2 is already in normal form
    let q = catalog::get::<f64>("neg1d").unwrap();
    let nf = symplectic_normal_form(&q).unwrap();
    assert_eq!((nf.k, nf.l), (0, 1));
    let dev = (&nf.chi - &Array2::<f64>::eye(2))
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-8, "chi deviates from identity by {dev:e}");
    assert_normal_form_invariants(&q, &nf);
}

#[test]
fn normal_form_shear_cross_term() {
    // -Re q = (x+xi)^2: rank one, needs a genuine change of coordinates
    let q = form(
        1,
        &[
            (0, 0, c(-1.0, 0.0)),
            (0, 1, c(-1.0, 0.0)),
            (1, 1, c(-1.0, 0.0)),
        ],
    );
    let nf = symplectic_normal_form(&q).unwrap();
    assert_eq!((nf.k, nf.l), (0, 1));
    assert_normal_form_invariants(&q, &nf);
}

#[test]
fn normal_form_split_pair_is_identity() {
    let q = mix2d();
    let nf = symplectic_normal_form(&q).unwrap();
    assert_eq!((nf.k, nf.l), (1, 0));
    assert!((nf.lambdas[0] - 1.0).abs() < 1e-12);
    let dev = (&nf.chi - &Array2::<f64>::eye(4))
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-8, "chi deviates from identity by {dev:e}");
    assert_normal_form_invariants(&q, &nf);
}

#[test]
fn normal_form_nilpotent_shear() {
    let q = nil1d();
    let nf = symplectic_normal_form(&q).unwrap();
    assert_eq!((nf.k, nf.l), (0, 1));
    assert_normal_form_invariants(&q, &nf);
}

#[test]
fn split_oscillator_is_trivial() {
    let q = ho1d();
    let t = split_real_eigenspaces(&q).unwrap();
    assert_eq!(t.s_basis.ncols(), 0);
    assert!(t.mu.is_empty());
    assert_eq!(t.q_tilde.n(), 1);
    let dev = (t.q_tilde.matrix() - q.matrix())
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-14, "q_tilde should be q itself, deviates by {dev:e}");
}

#[test]
fn split_pair_extracts_second_plane() {
    let q = mix2d();
    let t = split_real_eigenspaces(&q).unwrap();
    assert_eq!(t.s_basis.ncols(), 2);
    assert_eq!(t.mu.len(), 1);
    assert!((t.mu[0] - 1.0).abs() < 1e-9);
    assert!((t.epsilon - 1.0).abs() < 1e-12);
    // S is the (x2, xi2) coordinate plane
    for col in t.s_basis.columns() {
        assert!(col[0].abs() < 1e-9 && col[2].abs() < 1e-9, "S leaks into plane 1");
    }
    // Re F annihilates S
    let ref_ = hamilton_map(&q).re();
    for col in t.s_basis.columns() {
        let img = ref_.dot(&col);
        let norm = img.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 1e-9, "Re F does not annihilate S: {norm:e}");
    }
    // the restriction to the symplectic complement is the 1-D oscillator
    assert_eq!(t.q_tilde.n(), 1);
    let dev = (t.q_tilde.matrix() - ho1d().matrix())
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-8, "q_tilde misses -x^2-xi^2 by {dev:e}");
    // combined change of coordinates is symplectic and block-diagonalizes q
    let m = t.combined_symplectic();
    let j = j_real::<f64>(2);
    let gram = m.t().dot(&j).dot(&m);
    let dev = (&gram - &j).iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(dev < 1e-9, "combined basis not symplectic: {dev:e}");
}

#[test]
fn split_whole_space_when_all_eigenvalues_real() {
    let q = imag_osc();
    let t = split_real_eigenspaces(&q).unwrap();
    assert_eq!(t.s_basis.ncols(), 2);
    assert_eq!(t.sperp_basis.ncols(), 0);
    assert_eq!(t.q_tilde.n(), 0);
    assert_eq!(t.mu.len(), 1);
    assert!((t.mu[0] - 1.0).abs() < 1e-9);
    assert!((t.epsilon - 1.0).abs() < 1e-12);
}

#[test]
fn split_rejects_non_elliptic() {
    let q = catalog::get::<f64>("neg1d").unwrap();
    let err = split_real_eigenspaces(&q).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(_)), "{err}");
}

#[test]
fn oscillator_spectrum_is_odd_negative_integers() {
    let rep = operator_spectrum(&ho1d(), 10.0).unwrap();
    assert_eq!(rep.points.len(), 5);
    let mut res: Vec<f64> = rep.points.iter().map(|p| p.z.re).collect();
    res.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for (got, want) in res.iter().zip([-1.0, -3.0, -5.0, -7.0, -9.0]) {
        assert!((got - want).abs() < 1e-10, "got {got}, want {want}");
    }
    for p in &rep.points {
        assert!(p.z.im.abs() < 1e-10);
    }
    assert!((rep.a0 - 1.0).abs() < 1e-12);
}

#[test]
fn split_pair_spectrum_is_shifted_lattice() {
    let rep = operator_spectrum(&mix2d(), 4.0).unwrap();
    let expected = [c(-1.0, 1.0), c(-1.0, 3.0), c(-3.0, 1.0)];
    assert_eq!(rep.points.len(), expected.len());
    for want in expected {
        assert!(
            rep.points.iter().any(|p| (p.z - want).norm() < 1e-10),
            "missing lattice point {want}"
        );
    }
    assert!((rep.a0 - 1.0).abs() < 1e-12);
    // both admissible eigenvalue directions lie on the sector boundary
    assert_eq!(rep.admissible.len(), 2);
    assert!(rep.admissible.iter().all(|a| a.on_boundary));
}

#[test]
fn shear_spectrum_lies_on_interior_ray() {
    let rep = operator_spectrum(&nil1d(), 5.0).unwrap();
    assert_eq!(rep.points.len(), 2);
    let dir = Complex64::from_polar(2f64.powf(0.25), 5.0 * std::f64::consts::PI / 8.0);
    for (i, mult) in [1.0, 3.0].iter().enumerate() {
        let want = dir * *mult;
        assert!(
            rep.points.iter().any(|p| (p.z - want).norm() < 1e-10),
            "missing point {} = {want}",
            i
        );
    }
    let a0 = 2f64.powf(0.25) * (3.0 * std::f64::consts::PI / 8.0).cos();
    assert!((rep.a0 - a0).abs() < 1e-10, "a0 = {}, want {a0}", rep.a0);
}

#[test]
fn spectrum_rejects_non_elliptic() {
    let q = catalog::get::<f64>("neg1d").unwrap();
    let err = operator_spectrum(&q, 5.0).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(_)), "{err}");
}

#[test]
fn decay_rate_oscillator() {
    let d = decay_rate(&ho1d()).unwrap();
    assert!((d.a0 - 1.0).abs() < 1e-12);
    assert!((d.oscillator_rate.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn decay_rate_shear_has_no_constant_free_rate() {
    let d = decay_rate(&nil1d()).unwrap();
    let want = 2f64.powf(0.25) * (3.0 * std::f64::consts::PI / 8.0).cos();
    assert!((d.a0 - want).abs() < 1e-10, "a0 = {}", d.a0);
    assert!(d.oscillator_rate.is_none());
}

#[test]
fn decay_rate_rotated_oscillator() {
    let q = catalog::get::<f64>("rot1d").unwrap();
    let d = decay_rate(&q).unwrap();
    let want = (std::f64::consts::PI / 4.0).cos();
    assert!((d.a0 - want).abs() < 1e-12);
    assert!((d.oscillator_rate.unwrap() - want).abs() < 1e-12);
}

#[test]
fn decay_rate_rejects_vanishing_real_part() {
    let err = decay_rate(&imag_osc()).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
}
