//! File formats for matrices and sampled curves.
//!
//! Matrices use a small binary container: an 8-byte magic, a little-endian
//! u64 dimension, then dim*dim complex entries as little-endian f64 pairs
//! (re, im) in row-major order, followed by a human-readable metadata
//! footer of '#'-prefixed lines. CSV emitters append the same kind of
//! footer so every artifact records how it was produced.

use crate::error::{Error, Result};
use crate::resolvent::PseudospectrumGrid;
use crate::scalar::Real;
use crate::semigroup::NormProfile;
use ndarray::prelude::*;
use ndarray_linalg::Scalar;
use num_traits::ToPrimitive;
use std::io::{Read as _, Write as _};
use std::path::Path;

const MAGIC: &[u8; 8] = b"QSEMIMAT";

fn meta_block(meta: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (key, value) in meta {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    out
}

fn f(value: impl ToPrimitive) -> String {
    format!("{:.16e}", value.to_f64().unwrap_or(f64::NAN))
}

/// Write a complex matrix with a metadata footer. Entries are stored as
/// f64 regardless of the working precision.
pub fn write_matrix<T: Real>(
    path: impl AsRef<Path>,
    matrix: &Array2<T::C>,
    meta: &[(&str, String)],
) -> Result<()> {
    let (rows, cols) = matrix.dim();
    if rows != cols {
        return Err(Error::Dimension(format!(
            "matrix file stores square matrices, got {rows}x{cols}"
        )));
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(MAGIC)?;
    file.write_all(&(rows as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(rows * cols * 16);
    for v in matrix.iter() {
        buf.extend_from_slice(&v.re().to_f64().unwrap_or(f64::NAN).to_le_bytes());
        buf.extend_from_slice(&v.im().to_f64().unwrap_or(f64::NAN).to_le_bytes());
    }
    file.write_all(&buf)?;
    file.write_all(meta_block(meta).as_bytes())?;
    Ok(())
}

/// Read a matrix written by [`write_matrix`], returning it together with
/// the metadata footer text.
pub fn read_matrix<T: Real>(path: impl AsRef<Path>) -> Result<(Array2<T::C>, String)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(Error::Parse("not a matrix file (bad magic)".into()));
    }
    let dim = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let payload = dim
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(16))
        .ok_or_else(|| Error::Parse("matrix dimension overflows".into()))?;
    if bytes.len() < 16 + payload {
        return Err(Error::Parse("matrix file truncated".into()));
    }
    let mut matrix = Array2::from_elem((dim, dim), T::c(T::zero(), T::zero()));
    for (k, slot) in matrix.iter_mut().enumerate() {
        let at = 16 + 16 * k;
        let re = f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[at + 8..at + 16].try_into().unwrap());
        *slot = T::cl(re, im);
    }
    let footer = std::str::from_utf8(&bytes[16 + payload..])
        .map_err(|_| Error::Parse("metadata footer is not UTF-8".into()))?;
    if !footer.lines().all(|l| l.is_empty() || l.starts_with('#')) {
        return Err(Error::Parse(
            "trailing bytes after the payload are not a metadata footer".into(),
        ));
    }
    Ok((matrix, footer.to_string()))
}

/// CSV rendering of a norm profile: header `t,norm`, one row per sample,
/// then the metadata footer.
pub fn norm_profile_csv<T: Real>(profile: &NormProfile<T>, meta: &[(&str, String)]) -> String {
    let mut out = String::from("t,norm\n");
    for (t, n) in profile.times.iter().zip(&profile.norms) {
        out.push_str(&format!("{},{}\n", f(*t), f(*n)));
    }
    out.push_str(&meta_block(meta));
    out
}

/// CSV rendering of a resolvent-norm grid: header `re,im,resnorm`, rows of
/// constant imaginary part, then the metadata footer.
pub fn pseudospectrum_csv<T: Real>(
    grid: &PseudospectrumGrid<T>,
    meta: &[(&str, String)],
) -> String {
    let mut out = String::from("re,im,resnorm\n");
    for (z, v) in grid.points().zip(grid.values.iter()) {
        out.push_str(&format!("{},{},{}\n", f(z.re()), f(z.im()), f(*v)));
    }
    out.push_str(&meta_block(meta));
    out
}
