//! Documented default tolerances, with a process-wide scale override for the
//! command-line `--tol` flag.
//!
//! Each constant is the base value used by the operation that documents it.
//! [`scaled`] applies the override multiplier; property thresholds that are
//! part of a published contract (test suites) reference the constants
//! directly and are not affected by the override.

use crate::scalar::Real;
use std::sync::atomic::{AtomicU64, Ordering};

/// Relative symmetry tolerance accepted for a coefficient matrix on load.
pub const SYMMETRY: f64 = 1e-12;
/// Relative positive-definiteness threshold in the ellipticity witness sweep.
pub const ELLIPTIC: f64 = 1e-9;
/// Relative eigenvalue clustering tolerance for the Hamilton map.
pub const CLUSTER: f64 = 1e-7;
/// Relative threshold deciding ranks, nilpotency and real-eigenvalue tests.
pub const SPECTRAL: f64 = 1e-9;
/// Angular tolerance for sector membership of spectrum generators.
pub const ADMISSIBLE_ANGLE: f64 = 1e-8;
/// Relative strict-negativity band in the symbol-order search.
pub const ORDER: f64 = 1e-9;
/// Relative residual allowed by the matrix-exponential accuracy contract.
pub const EXPM_RESIDUAL: f64 = 1e-8;

static SCALE_BITS: AtomicU64 = AtomicU64::new(0x3FF0000000000000); // 1.0

/// Override the tolerance scale (the CLI `--tol` flag divided by the default).
pub fn set_scale(scale: f64) {
    assert!(scale.is_finite() && scale > 0.0, "tolerance scale must be positive");
    SCALE_BITS.store(scale.to_bits(), Ordering::Relaxed);
}

/// Current tolerance scale multiplier (1.0 unless overridden).
pub fn scale() -> f64 {
    f64::from_bits(SCALE_BITS.load(Ordering::Relaxed))
}

/// A base tolerance with the process-wide override applied.
pub fn scaled<T: Real>(base: f64) -> T {
    T::lit(base * scale())
}
