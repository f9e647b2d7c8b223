//! Complex quadratic forms on phase space R^{2n}, q(X) = X^T Q X with a
//! symmetric coefficient matrix Q in coordinate order (x_1..x_n, xi_1..xi_n).

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tol;
use ndarray::prelude::*;
use ndarray_linalg::Scalar;
use serde::{Deserialize, Serialize};

/// A complex-valued quadratic form q(X) = X^T Q X on R^{2n}.
///
/// Q is 2n×2n complex symmetric (not Hermitian); symmetry is enforced on
/// construction to a relative tolerance of [`tol::SYMMETRY`].
#[derive(Debug, Clone)]
pub struct ComplexQuadraticForm<T: Real> {
    n: usize,
    q: Array2<T::C>,
}

#[derive(Serialize, Deserialize)]
struct MatJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    n: usize,
    #[serde(rename = "Q")]
    q: MatJson,
}

impl<T: Real> ComplexQuadraticForm<T> {
    /// Wrap a coefficient matrix, validating shape and symmetry.
    pub fn new(n: usize, q: Array2<T::C>) -> Result<Self> {
        if q.nrows() != 2 * n || q.ncols() != 2 * n {
            return Err(Error::Dimension(format!(
                "coefficient matrix must be {0}x{0}, got {1}x{2}",
                2 * n,
                q.nrows(),
                q.ncols()
            )));
        }
        let scale = T::one() + frob(&q);
        let mut asym = T::zero();
        for i in 0..2 * n {
            for j in 0..i {
                let d = (q[[i, j]] - q[[j, i]]).abs();
                if d > asym {
                    asym = d;
                }
            }
        }
        if asym > T::lit(tol::SYMMETRY) * scale {
            return Err(Error::Parse(format!(
                "coefficient matrix not symmetric: max |Q - Q^T| = {asym:e} exceeds tolerance"
            )));
        }
        Ok(Self { n, q })
    }

    /// Wrap a coefficient matrix after exact resymmetrization (Q + Q^T)/2.
    pub fn resymmetrized(n: usize, q: Array2<T::C>) -> Result<Self> {
        let half = T::cl(0.5, 0.0);
        let sym = (&q + &q.t()).mapv(|z| z * half);
        Self::new(n, sym)
    }

    /// Space dimension n (phase space has dimension 2n).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient matrix Q.
    pub fn matrix(&self) -> &Array2<T::C> {
        &self.q
    }

    /// Real part of Q (coefficient matrix of Re q).
    pub fn re_matrix(&self) -> Array2<T> {
        self.q.mapv(|z| z.re())
    }

    /// Imaginary part of Q (coefficient matrix of Im q).
    pub fn im_matrix(&self) -> Array2<T> {
        self.q.mapv(|z| z.im())
    }

    /// Frobenius norm of Q.
    pub fn norm(&self) -> T {
        frob(&self.q)
    }

    /// Evaluate q at a real phase-space point.
    pub fn evaluate(&self, x: &Array1<T>) -> Result<T::C> {
        if x.len() != 2 * self.n {
            return Err(Error::Dimension(format!(
                "point has length {}, expected {}",
                x.len(),
                2 * self.n
            )));
        }
        Ok(self.eval_real(&x.view()))
    }

    /// Evaluate at a real point without the length check (internal hot path).
    pub(crate) fn eval_real(&self, x: &ArrayView1<T>) -> T::C {
        let mut acc = T::c(T::zero(), T::zero());
        for (i, xi) in x.iter().enumerate() {
            let mut row = T::c(T::zero(), T::zero());
            for (j, xj) in x.iter().enumerate() {
                row += self.q[[i, j]].mul_real(*xj);
            }
            acc += row.mul_real(*xi);
        }
        acc
    }

    /// Parse the JSON schema `{"n":…, "Q":{"re":[[…]], "im":[[…]]}}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let parsed: FormJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("form JSON: {e}")))?;
        if parsed.n == 0 {
            return Err(Error::Parse("n must be positive".into()));
        }
        let d = 2 * parsed.n;
        let check = |m: &Vec<Vec<f64>>, part: &str| -> Result<()> {
            if m.len() != d || m.iter().any(|row| row.len() != d) {
                return Err(Error::Parse(format!("{part} part must be a {d}x{d} matrix")));
            }
            Ok(())
        };
        check(&parsed.q.re, "re")?;
        check(&parsed.q.im, "im")?;
        let mut q = Array2::from_elem((d, d), T::c(T::zero(), T::zero()));
        for i in 0..d {
            for j in 0..d {
                q[[i, j]] = T::cl(parsed.q.re[i][j], parsed.q.im[i][j]);
            }
        }
        match Self::new(parsed.n, q) {
            Ok(f) => Ok(f),
            // surface symmetry violations as parse errors: the file is invalid
            Err(Error::Dimension(m)) => Err(Error::Parse(m)),
            Err(e) => Err(e),
        }
    }

    /// Serialize to the JSON schema; f64 round-trips are bit-identical.
    pub fn to_json_string(&self) -> String {
        let d = 2 * self.n;
        let mut re = vec![vec![0.0f64; d]; d];
        let mut im = vec![vec![0.0f64; d]; d];
        for i in 0..d {
            for j in 0..d {
                re[i][j] = num_traits::ToPrimitive::to_f64(&self.q[[i, j]].re()).unwrap();
                im[i][j] = num_traits::ToPrimitive::to_f64(&self.q[[i, j]].im()).unwrap();
            }
        }
        serde_json::to_string_pretty(&FormJson {
            n: self.n,
            q: MatJson { re, im },
        })
        .expect("form serialization")
    }

    /// Load from a file path.
    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }
}

/// Frobenius norm of a complex matrix.
pub(crate) fn frob<T: Real>(m: &Array2<T::C>) -> T {
    crate::scalar::rsqrt(m.iter().map(|z| z.square()).sum::<T>())
}

/// Frobenius norm of a real matrix.
pub(crate) fn frob_real<T: Real>(m: &Array2<T>) -> T {
    crate::scalar::rsqrt(m.iter().map(|v| *v * *v).sum::<T>())
}
