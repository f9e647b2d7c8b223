//! Resolvent norms of truncated operators, pointwise and on rectangular
//! grids.

use crate::error::{Error, Result};
use crate::linalg::sigma_min;
use crate::scalar::Real;
use crate::weyl::TruncatedOperator;
use ndarray::prelude::*;
use ndarray_linalg::Scalar;
use rayon::prelude::*;

/// Largest number of grid points a single sweep may request.
const MAX_GRID_POINTS: usize = 250_000;

/// Norm of (A - z)^{-1}, the reciprocal smallest singular value of A - zI.
/// Returns the infinity marker when z is (numerically exactly) an
/// eigenvalue.
pub fn resolvent_norm<T: Real>(op: &TruncatedOperator<T>, z: T::C) -> Result<T> {
    let a = &op.matrix;
    let d = a.nrows();
    // exactly diagonal matrices resolve by inspection; this keeps the
    // oscillator case free of SVD rounding
    let diagonal = a
        .indexed_iter()
        .all(|((i, j), v)| i == j || v.abs() == T::zero());
    if diagonal {
        let mut dist = T::infinity();
        for i in 0..d {
            let dv = (a[[i, i]] - z).abs();
            if dv < dist {
                dist = dv;
            }
        }
        if dist == T::zero() {
            return Ok(T::infinity());
        }
        return Ok(T::one() / dist);
    }
    let shifted = Array2::from_shape_fn((d, d), |(i, j)| {
        if i == j {
            a[[i, j]] - z
        } else {
            a[[i, j]]
        }
    });
    let s = sigma_min::<T>(&shifted)?;
    if s == T::zero() {
        return Ok(T::infinity());
    }
    Ok(T::one() / s)
}

/// Rectangular window in the complex plane.
#[derive(Debug, Clone, Copy)]
pub struct GridWindow<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
}

/// Resolvent norms sampled on a rectangular grid, stored row-major with the
/// imaginary axis as the slow index.
#[derive(Debug, Clone)]
pub struct PseudospectrumGrid<T: Real> {
    pub re: Vec<T>,
    pub im: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> PseudospectrumGrid<T> {
    /// Grid points in storage order (rows of constant imaginary part).
    pub fn points(&self) -> impl Iterator<Item = T::C> + '_ {
        self.im
            .iter()
            .flat_map(move |&y| self.re.iter().map(move |&x| T::c(x, y)))
    }
}

fn linspace<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let dn = T::lit((count - 1) as f64);
    (0..count)
        .map(|i| lo + (hi - lo) * T::lit(i as f64) / dn)
        .collect()
}

/// Resolvent norms over an nx-by-ny grid, evaluated independently per point
/// (in parallel) and assembled in deterministic row-major order.
pub fn pseudospectrum_grid<T: Real>(
    op: &TruncatedOperator<T>,
    window: &GridWindow<T>,
    nx: usize,
    ny: usize,
) -> Result<PseudospectrumGrid<T>> {
    if nx == 0 || ny == 0 {
        return Err(Error::Parse("grid must have at least one point per axis".into()));
    }
    if !(window.re_min <= window.re_max && window.im_min <= window.im_max) {
        return Err(Error::Parse("window bounds are not ordered".into()));
    }
    let total = nx
        .checked_mul(ny)
        .ok_or_else(|| Error::Limit("grid size overflows".into()))?;
    if total > MAX_GRID_POINTS {
        return Err(Error::Limit(format!(
            "grid of {total} points exceeds the cap {MAX_GRID_POINTS}"
        )));
    }
    let re = linspace(window.re_min, window.re_max, nx);
    let im = linspace(window.im_min, window.im_max, ny);
    let values = (0..total)
        .into_par_iter()
        .map(|k| resolvent_norm(op, T::c(re[k % nx], im[k / nx])))
        .collect::<Result<Vec<T>>>()?;
    Ok(PseudospectrumGrid { re, im, values })
}
