//! Oracle tests for the subellipticity layer: the auxiliary positive form
//! r, the symbol order at phase-space points, and the order on rays of the
//! numerical range.

use ndarray::prelude::*;
use num_complex::Complex64;
use qsemi::catalog;
use qsemi::form::ComplexQuadraticForm;
use qsemi::order::{order_at_point, order_on_ray, r_form};
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

fn imag_osc() -> ComplexQuadraticForm<f64> {
    form(1, &[(0, 0, c(0.0, 1.0)), (1, 1, c(0.0, 1.0))])
}

fn max_dev(m: &Array2<f64>, target: &Array2<f64>) -> f64 {
    (m - target).iter().map(|v| v.abs()).fold(0.0, f64::max)
}

#[test]
fn r_form_of_shear_is_identity() {
    // Im F = J, so the two-term sum gives x^2 then xi^2
    let r = r_form(&nil1d()).unwrap();
    assert!(r.positive_definite);
    let dev = max_dev(&r.matrix, &Array2::eye(2));
    assert!(dev < 1e-12, "R deviates from I by {dev:e}");
}

#[test]
fn r_form_of_oscillator_is_identity() {
    // Im F = 0: only the j = 0 term -Re Q survives
    let r = r_form(&ho1d()).unwrap();
    assert!(r.positive_definite);
    let dev = max_dev(&r.matrix, &Array2::eye(2));
    assert!(dev < 1e-12, "R deviates from I by {dev:e}");
}

#[test]
fn r_form_vanishes_without_real_part() {
    let r = r_form(&imag_osc()).unwrap();
    assert!(!r.positive_definite);
    let dev = max_dev(&r.matrix, &Array2::zeros((2, 2)));
    assert!(dev < 1e-14, "R should vanish, deviates by {dev:e}");
}

#[test]
fn r_form_rejects_positive_real_part() {
    let q = form(1, &[(0, 0, c(1.0, 0.0))]);
    let err = r_form(&q).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(_)), "{err}");
}

#[test]
fn shear_order_zero_where_real_part_bites() {
    let res = order_at_point(&nil1d(), &array![1.0, 0.0]).unwrap();
    assert!(res.finite);
    assert_eq!((res.j0, res.k), (0, 0));
    assert!((res.bracket_value.re + 1.0).abs() < 1e-12);
    assert!(res.bracket_value.im.abs() < 1e-12);
}

#[test]
fn shear_order_two_on_imaginary_axis_preimage() {
    // Re q(0,1) = 0 but Re q(Im F (0,1)) = Re q(1,0) = -1
    let res = order_at_point(&nil1d(), &array![0.0, 1.0]).unwrap();
    assert!(res.finite);
    assert_eq!((res.j0, res.k), (1, 2));
    // hand value of {Im q, {Im q, Re q}} at (0,1)
    assert!(
        (res.bracket_value.re + 8.0).abs() < 1e-12,
        "bracket = {}",
        res.bracket_value
    );
    assert!(res.bracket_value.im.abs() < 1e-12);
}

#[test]
fn oscillator_order_zero_everywhere() {
    let res = order_at_point(&ho1d(), &array![1.0, 0.0]).unwrap();
    assert_eq!((res.j0, res.k), (0, 0));
    let res = order_at_point(&ho1d(), &array![0.6, -0.8]).unwrap();
    assert_eq!((res.j0, res.k), (0, 0));
}

#[test]
fn order_is_homogeneous() {
    let a = order_at_point(&nil1d(), &array![0.0, 1.0]).unwrap();
    let b = order_at_point(&nil1d(), &array![0.0, 2.0]).unwrap();
    assert_eq!((a.j0, a.k), (b.j0, b.k));
    // the bracket value of a quadratic form scales with |X0|^2 per factor
    assert!((b.bracket_value.re - 4.0 * a.bracket_value.re).abs() < 1e-10);
}

#[test]
fn order_rejects_zero_point() {
    let err = order_at_point(&nil1d(), &array![0.0, 0.0]).unwrap_err();
    assert!(matches!(err, Error::Parse(_)), "{err}");
}

#[test]
fn order_rejects_real_hamilton_eigenvalues() {
    // the mixed form has real Hamilton eigenvalues; finiteness is not
    // guaranteed there and the operation refuses
    let q = catalog::get::<f64>("mix2d").unwrap();
    let err = order_at_point(&q, &array![1.0, 0.0, 0.0, 0.0]).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(_)), "{err}");
}

#[test]
fn shear_boundary_ray_has_maximal_order() {
    // order on the ray i R_+ is 2 = 4n-2 for n = 1
    let (res, x0) = order_on_ray(&nil1d(), std::f64::consts::PI / 2.0).unwrap();
    assert_eq!((res.j0, res.k), (1, 2));
    // the preimage is (0, +-1) up to refinement error
    assert!(x0[0].abs() < 1e-3, "preimage x component {}", x0[0]);
}

#[test]
fn shear_other_boundary_ray_is_order_zero() {
    let (res, x0) = order_on_ray(&nil1d(), 3.0 * std::f64::consts::PI / 4.0).unwrap();
    assert_eq!((res.j0, res.k), (0, 0));
    assert!(x0[1].abs() < 1e-3, "preimage xi component {}", x0[1]);
}

#[test]
fn shear_interior_ray_is_order_zero() {
    let (res, _) = order_on_ray(&nil1d(), 5.0 * std::f64::consts::PI / 8.0).unwrap();
    assert_eq!((res.j0, res.k), (0, 0));
}

#[test]
fn oscillator_ray_is_order_zero() {
    let (res, _) = order_on_ray(&ho1d(), std::f64::consts::PI).unwrap();
    assert_eq!((res.j0, res.k), (0, 0));
}

#[test]
fn ray_outside_range_is_rejected() {
    let err = order_on_ray(&nil1d(), 0.0).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(_)), "{err}");
}

#[test]
fn order_result_serializes() {
    let res = order_at_point(&nil1d(), &array![0.0, 1.0]).unwrap();
    let j = res.to_json();
    assert_eq!(j["j0"], 1);
    assert_eq!(j["k"], 2);
    assert_eq!(j["finite"], true);
    assert!(j["bracket_value"]["re"].as_f64().unwrap() < 0.0);
}
