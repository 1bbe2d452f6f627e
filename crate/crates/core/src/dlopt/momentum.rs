use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Momentum,
    Nesterov,
}

/// Previous update per weight plus the coefficients that drive the next one.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    pub velocity: Vec<f64>,
    pub momentum: f64,
    pub learning_rate: f64,
}

impl MomentumState {
    /// A learning rate of 0 is accepted and yields null steps.
    pub fn new(weights: usize, momentum: f64, learning_rate: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&momentum) {
            return Err(Error::Parameter(format!("momentum {momentum} outside [0, 1)")));
        }
        if !(learning_rate >= 0.0 && learning_rate.is_finite()) {
            return Err(Error::Parameter(format!("learning rate {learning_rate} must be >= 0")));
        }
        Ok(Self { velocity: vec![0.0; weights], momentum, learning_rate })
    }

    /// `dw(t) = -lr * g + m * dw(t-1)`; the velocity becomes `dw(t)`.
    pub fn momentum_step(&mut self, gradient: &[f64]) -> Result<Vec<f64>> {
        check_len(self.velocity.len(), gradient.len())?;
        for (v, g) in self.velocity.iter_mut().zip(gradient) {
            *v = -self.learning_rate * g + self.momentum * *v;
        }
        Ok(self.velocity.clone())
    }

    /// Same update with the gradient taken at the look-ahead point
    /// `w + m * dw(t-1)`.
    pub fn nesterov_step<F>(&mut self, weights: &[f64], mut gradient_at: F) -> Result<Vec<f64>>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        check_len(self.velocity.len(), weights.len())?;
        let lookahead: Vec<f64> = weights
            .iter()
            .zip(&self.velocity)
            .map(|(w, v)| w + self.momentum * v)
            .collect();
        let gradient = gradient_at(&lookahead)?;
        self.momentum_step(&gradient)
    }
}
