use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Learning rate as a pure function of the epoch index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LrSchedule {
    /// `lr0 * factor^floor(epoch / period)`
    Step { lr0: f64, factor: f64, period: usize },
    /// `lr0 * exp(-k * epoch)`
    #[serde(rename = "exp")]
    Exponential { lr0: f64, k: f64 },
}

impl LrSchedule {
    pub fn constant(lr: f64) -> Self {
        LrSchedule::Exponential { lr0: lr, k: 0.0 }
    }

    pub fn initial(&self) -> f64 {
        match *self {
            LrSchedule::Step { lr0, .. } | LrSchedule::Exponential { lr0, .. } => lr0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lr0 = self.initial();
        if !(lr0 >= 0.0 && lr0.is_finite()) {
            return Err(Error::Parameter(format!("lr0 {lr0} must be >= 0")));
        }
        match *self {
            LrSchedule::Step { factor, period, .. } => {
                if !(factor > 0.0 && factor < 1.0) {
                    return Err(Error::Parameter(format!("step factor {factor} outside (0, 1)")));
                }
                if period == 0 {
                    return Err(Error::Parameter("step period must be >= 1".into()));
                }
            }
            LrSchedule::Exponential { k, .. } => {
                if !(k >= 0.0) {
                    return Err(Error::Parameter(format!("decay rate {k} must be >= 0")));
                }
            }
        }
        Ok(())
    }

    pub fn lr_at(&self, epoch: usize) -> f64 {
        match *self {
            LrSchedule::Step { lr0, factor, period } => lr0 * factor.powi((epoch / period) as i32),
            LrSchedule::Exponential { lr0, k } => lr0 * (-k * epoch as f64).exp(),
        }
    }
}
