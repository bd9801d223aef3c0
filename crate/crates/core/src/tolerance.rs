//! Every numerical threshold used by the library, in one record.

use serde::{Deserialize, Serialize};

/// Environment variable that overrides the verdict tolerances (`cp` and `triangle`).
pub const TOLERANCE_ENV: &str = "LINDBLAD_TOL";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Cubic discriminant below `cubic_degenerate * scale^6` is treated as a repeated real root.
    pub cubic_degenerate: f64,
    /// Absolute slack on the smallest eigenvalue of C, multiplied by `max(1, ||C||_F)`.
    pub cp: f64,
    /// Slack allowed on every triangle relation and on the positivity of each rate.
    pub triangle: f64,
    /// `solve3` rejects `|det| <= singular * (max row norm)^3`.
    pub singular: f64,
    /// Rank test used to tell a defective repeated eigenvalue from a diagonalizable one.
    pub defective: f64,
    /// Absolute tolerance when matching a generator to the standard Bloch template.
    pub bloch_pattern: f64,
    /// Largest entry allowed in the (1,3),(2,3) positions of a rotated Bloch matrix.
    pub rotation_zero: f64,
    /// Envelopes below this are excluded from log-linear fits.
    pub fit_envelope_floor: f64,
    /// Largest per-channel RMS residual for which a fit is used in a triangle verdict.
    pub fit_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cubic_degenerate: 1e-12,
            cp: 1e-9,
            triangle: 1e-9,
            singular: 1e-12,
            defective: 1e-7,
            bloch_pattern: 1e-12,
            rotation_zero: 1e-10,
            fit_envelope_floor: 1e-12,
            fit_residual: 1e-3,
        }
    }
}

impl Tolerances {
    /// Defaults with both verdict tolerances replaced by `tol`.
    pub fn with_verdict_tolerance(tol: f64) -> Self {
        Self {
            cp: tol,
            triangle: tol,
            ..Self::default()
        }
    }

    /// Defaults, or the verdict override from [`TOLERANCE_ENV`] when it holds a
    /// finite non-negative number.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(TOLERANCE_ENV) {
            Ok(raw) => {
                let tol: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| format!("{TOLERANCE_ENV}={raw:?} is not a number"))?;
                if !tol.is_finite() || tol < 0.0 {
                    return Err(format!("{TOLERANCE_ENV} must be finite and non-negative"));
                }
                Ok(Self::with_verdict_tolerance(tol))
            }
            Err(_) => Ok(Self::default()),
        }
    }
}
