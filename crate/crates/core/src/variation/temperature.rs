use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::Genome;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureParams {
    /// Proportion scaling the weight-perturbation variance.
    pub alpha: f64,
    pub delta_min: usize,
    pub delta_max: usize,
    /// Maximum attainable fitness.
    pub f_max: f64,
}

impl TemperatureParams {
    pub fn validate(&self) -> Result<()> {
        if self.delta_min > self.delta_max {
            return Err(Error::Parameter("delta_min must not exceed delta_max".into()));
        }
        if !(self.f_max > 0.0) || !(self.alpha > 0.0) {
            return Err(Error::Parameter("f_max and alpha must be positive".into()));
        }
        Ok(())
    }
}

/// `T = 1 - f / f_max`.
pub fn temperature(fitness: f64, f_max: f64) -> Result<f64> {
    if !(0.0..=f_max).contains(&fitness) {
        return Err(Error::Domain(format!("fitness {fitness} outside [0, {f_max}]")));
    }
    Ok(1.0 - fitness / f_max)
}

/// Fresh `U(0,1) * T` for one operator invocation.
pub fn instantaneous_temperature<R: Rng + ?Sized>(t: f64, rng: &mut R) -> f64 {
    rng.random::<f64>() * t
}

/// Adds `N(0, alpha * t_inst)` noise to every weight; the second argument is
/// a variance. Structure is untouched, and a zero variance leaves every
/// weight bit-identical.
pub fn perturb_weights<R: Rng + ?Sized>(
    genome: &Genome,
    alpha: f64,
    t_inst: f64,
    rng: &mut R,
) -> Result<Genome> {
    let variance = alpha * t_inst;
    if !(variance >= 0.0) {
        return Err(Error::Parameter(format!("perturbation variance {variance} is negative")));
    }
    let mut out = genome.clone();
    if variance == 0.0 {
        return Ok(out);
    }
    let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| Error::Parameter(e.to_string()))?;
    match &mut out {
        Genome::Matrix(m) => {
            for (i, j) in m.connections() {
                m.weights[i][j] += normal.sample(rng);
            }
        }
        Genome::Genelist(g) => {
            for c in &mut g.connections {
                c.weight += normal.sample(rng);
            }
        }
        Genome::Bitstring(_) => {
            return Err(Error::Parameter(
                "bit-string weights mutate through bit flips, not Gaussian noise".into(),
            ))
        }
    }
    Ok(out)
}

/// `delta_min + floor(U(0,1) * t_inst * (delta_max - delta_min))`.
pub fn structural_mutation_count<R: Rng + ?Sized>(
    delta_min: usize,
    delta_max: usize,
    t_inst: f64,
    rng: &mut R,
) -> usize {
    let span = delta_max.saturating_sub(delta_min) as f64;
    let extra = (rng.random::<f64>() * t_inst.clamp(0.0, 1.0) * span).floor() as usize;
    (delta_min + extra).min(delta_max)
}
