//! Shared model configuration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Configuration of one simulation or oracle evaluation: branching rate β,
/// start position x₀ and time horizon t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: f64,
    pub x0: f64,
    pub t: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("branching rate beta must be positive and finite, got {0}")]
    BadBeta(f64),
    #[error("horizon t must be nonnegative and finite, got {0}")]
    BadHorizon(f64),
    #[error("start position x0 must be finite, got {0}")]
    BadStart(f64),
}

impl ModelParams {
    pub fn new(beta: f64, x0: f64, t: f64) -> Result<Self, ParamError> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(ParamError::BadBeta(beta));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(ParamError::BadHorizon(t));
        }
        if !x0.is_finite() {
            return Err(ParamError::BadStart(x0));
        }
        Ok(Self { beta, x0, t })
    }

    /// Position of the front at the horizon, βt/2.
    pub fn front(&self) -> f64 {
        0.5 * self.beta * self.t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModelParams::new(0.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(-1.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.0, -1.0).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.0, f64::INFINITY).is_err());
        let p = ModelParams::new(1.0, 0.5, 4.0).unwrap();
        assert_eq!(p.front(), 2.0);
    }
}
