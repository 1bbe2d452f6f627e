use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BnMode {
    Train,
    Infer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormState {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub epsilon: f64,
    /// Weight of the old running value in the moving average.
    pub momentum_stats: f64,
}

impl BatchNormState {
    pub fn new(features: usize) -> Self {
        Self {
            gamma: vec![1.0; features],
            beta: vec![0.0; features],
            running_mean: vec![0.0; features],
            running_var: vec![1.0; features],
            epsilon: 1e-5,
            momentum_stats: 0.9,
        }
    }

    pub fn features(&self) -> usize {
        self.gamma.len()
    }
}

/// Values kept from a forward call for the matching backward call.
#[derive(Debug, Clone, PartialEq)]
pub struct BnCache {
    pub mode: BnMode,
    pub x_hat: Vec<Vec<f64>>,
    pub inv_std: Vec<f64>,
    pub gamma: Vec<f64>,
}

/// Normalizes each feature (column) of `batch`. Training mode uses the batch
/// statistics (biased variance) and folds them into the running averages;
/// inference mode uses the running statistics.
pub fn batchnorm_forward(
    batch: &[Vec<f64>],
    state: &mut BatchNormState,
    mode: BnMode,
) -> Result<(Vec<Vec<f64>>, BnCache)> {
    let f = state.features();
    if state.epsilon <= 0.0 {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    if let Some(row) = batch.iter().find(|r| r.len() != f) {
        return Err(Error::Dimension { expected: f, actual: row.len() });
    }
    let (mean, var) = match mode {
        BnMode::Train => {
            if batch.len() < 2 {
                return Err(Error::BatchSize(batch.len()));
            }
            let b = batch.len() as f64;
            let mut mean = vec![0.0; f];
            let mut var = vec![0.0; f];
            for k in 0..f {
                mean[k] = batch.iter().map(|r| r[k]).sum::<f64>() / b;
                var[k] = batch.iter().map(|r| (r[k] - mean[k]).powi(2)).sum::<f64>() / b;
            }
            let m = state.momentum_stats;
            for k in 0..f {
                state.running_mean[k] = m * state.running_mean[k] + (1.0 - m) * mean[k];
                state.running_var[k] = m * state.running_var[k] + (1.0 - m) * var[k];
            }
            (mean, var)
        }
        BnMode::Infer => (state.running_mean.clone(), state.running_var.clone()),
    };
    let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / (v + state.epsilon).sqrt()).collect();
    let x_hat: Vec<Vec<f64>> = batch
        .iter()
        .map(|r| (0..f).map(|k| (r[k] - mean[k]) * inv_std[k]).collect())
        .collect();
    let y = x_hat
        .iter()
        .map(|r| (0..f).map(|k| state.gamma[k] * r[k] + state.beta[k]).collect())
        .collect();
    let cache = BnCache { mode, x_hat, inv_std, gamma: state.gamma.clone() };
    Ok((y, cache))
}

/// Returns `(d input, d gamma, d beta)`.
pub fn batchnorm_backward(
    cache: &BnCache,
    upstream: &[Vec<f64>],
) -> Result<(Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
    let f = cache.gamma.len();
    if upstream.len() != cache.x_hat.len() {
        return Err(Error::Cache(format!(
            "cache holds {} rows, gradient has {}",
            cache.x_hat.len(),
            upstream.len()
        )));
    }
    if upstream.iter().any(|r| r.len() != f) {
        return Err(Error::Cache(format!("gradient rows must have {f} features")));
    }
    let b = upstream.len() as f64;
    let mut dgamma = vec![0.0; f];
    let mut dbeta = vec![0.0; f];
    for (dy, xh) in upstream.iter().zip(&cache.x_hat) {
        for k in 0..f {
            dgamma[k] += dy[k] * xh[k];
            dbeta[k] += dy[k];
        }
    }
    let dx = match cache.mode {
        BnMode::Infer => upstream
            .iter()
            .map(|dy| (0..f).map(|k| dy[k] * cache.gamma[k] * cache.inv_std[k]).collect())
            .collect(),
        BnMode::Train => {
            // sums of dx_hat and dx_hat * x_hat per feature
            let mut s1 = vec![0.0; f];
            let mut s2 = vec![0.0; f];
            for (dy, xh) in upstream.iter().zip(&cache.x_hat) {
                for k in 0..f {
                    let dxh = dy[k] * cache.gamma[k];
                    s1[k] += dxh;
                    s2[k] += dxh * xh[k];
                }
            }
            upstream
                .iter()
                .zip(&cache.x_hat)
                .map(|(dy, xh)| {
                    (0..f)
                        .map(|k| {
                            let dxh = dy[k] * cache.gamma[k];
                            cache.inv_std[k] / b * (b * dxh - s1[k] - xh[k] * s2[k])
                        })
                        .collect()
                })
                .collect()
        }
    };
    Ok((dx, dgamma, dbeta))
}
