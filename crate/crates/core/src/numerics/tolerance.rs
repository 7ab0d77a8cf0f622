use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every module.
///
/// `eq_tol` bounds entrywise/operator equality, `rank_tol` is the relative
/// cutoff below which singular values (and eigenvalue gaps) count as zero,
/// `conv_tol` and `max_iter` bound iterative procedures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerance {
    pub eq_tol: f64,
    pub rank_tol: f64,
    pub conv_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eq_tol: 1e-9,
            rank_tol: 1e-8,
            conv_tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eq_tol", self.eq_tol),
            ("rank_tol", self.rank_tol),
            ("conv_tol", self.conv_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidTolerance(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidTolerance("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}
