//! Built-in operator catalog: small named forms that pin every analysis
//! branch (oscillator, rotated oscillator, nilpotent shear, split pair,
//! non-elliptic counterexample).

use crate::form::ComplexQuadraticForm;
use crate::scalar::Real;
use ndarray::prelude::*;

/// A named catalog form with human-readable notes and expected headline
/// values for quick cross-checks.
#[derive(Debug, Clone)]
pub struct CatalogEntry<T: Real> {
    pub id: &'static str,
    pub form: ComplexQuadraticForm<T>,
    /// What the form exercises and where its expected values come from.
    pub notes: &'static str,
    /// Headline expectations in display form (decay rate, sector, class).
    pub expected: &'static str,
}

fn diag_form<T: Real>(n: usize, entries: &[(f64, f64)]) -> ComplexQuadraticForm<T> {
    let d = 2 * n;
    assert_eq!(entries.len(), d);
    let mut q = Array2::from_elem((d, d), T::cl(0.0, 0.0));
    for (i, (re, im)) in entries.iter().enumerate() {
        q[[i, i]] = T::cl(*re, *im);
    }
    ComplexQuadraticForm::new(n, q).expect("catalog form")
}

/// The rotated oscillator e^{i theta}(−x² − xi²).
pub fn rotated_oscillator<T: Real>(theta: f64) -> ComplexQuadraticForm<T> {
    let (s, c) = theta.sin_cos();
    diag_form::<T>(1, &[(-c, -s), (-c, -s)])
}

/// Identifiers of the built-in forms, in catalog order.
pub const IDS: [&str; 5] = ["ho1d", "rot1d", "nil1d", "mix2d", "neg1d"];

/// All catalog entries (with `rot1d` at its default angle pi/4).
pub fn entries<T: Real>() -> Vec<CatalogEntry<T>> {
    vec![
        CatalogEntry {
            id: "ho1d",
            form: diag_form::<T>(1, &[(-1.0, 0.0), (-1.0, 0.0)]),
            notes: "harmonic oscillator with reversed sign; diagonal truncations, \
                    spectrum -(2k+1), exact exponential decay e^{-t}",
            expected: "elliptic; range = ray at pi; non-nilpotent k=1, lambda1=1; a0=1",
        },
        CatalogEntry {
            id: "rot1d",
            form: rotated_oscillator::<T>(std::f64::consts::FRAC_PI_4),
            notes: "oscillator rotated by pi/4 in the complex plane; accepts \
                    rot1d(<radians>) for other angles",
            expected: "elliptic; range = ray at -3pi/4; a0 = cos(pi/4)",
        },
        CatalogEntry {
            id: "nil1d",
            form: diag_form::<T>(1, &[(-1.0, 1.0), (0.0, 1.0)]),
            notes: "(-1+i)x^2 + i xi^2: nilpotent real part, order 2 on the \
                    boundary ray pi/2, algebraic pseudospectral growth",
            expected: "elliptic; range = [pi/2, 3pi/4]; nilpotent k=0, l=1; \
                       a0 = 2^{1/4} cos(3pi/8) ~ 0.455090",
        },
        CatalogEntry {
            id: "mix2d",
            form: diag_form::<T>(2, &[(-1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, 1.0)]),
            notes: "-x1^2 - xi1^2 + i(x2^2 + xi2^2): real Hamilton eigenvalues on \
                    the second factor exercise the symplectic splitting",
            expected: "elliptic; range = [pi/2, pi]; splitting S = plane 2, mu1 = 1, \
                       epsilon = +1; a0 = 1",
        },
        CatalogEntry {
            id: "neg1d",
            form: diag_form::<T>(1, &[(-1.0, 0.0), (0.0, 0.0)]),
            notes: "-x^2 vanishes on the xi axis: the standard non-elliptic \
                    counterexample, rejected by every analysis",
            expected: "not elliptic",
        },
    ]
}

/// Look up a form by id. `rot1d` accepts an optional parameter in radians:
/// `rot1d(0.785398)`.
pub fn get<T: Real>(id: &str) -> Option<ComplexQuadraticForm<T>> {
    if let Some(rest) = id.strip_prefix("rot1d(") {
        let inner = rest.strip_suffix(')')?;
        let theta: f64 = inner.trim().parse().ok()?;
        return Some(rotated_oscillator::<T>(theta));
    }
    entries::<T>().into_iter().find(|e| e.id == id).map(|e| e.form)
}
