use crate::data::Batch;
use crate::error::{Error, Result};
use crate::fitness::{FitnessSpec, Measure};
use crate::genome::Genome;
use crate::phenotype::{partial_train_bp, Loss, Network, OptimizerState, TrainingData};

use super::config::EvolutionConfig;

/// Read-only view shared by every worker during one generation.
#[derive(Debug, Clone, Copy)]
pub struct Context<'a> {
    pub config: &'a EvolutionConfig,
    pub train: Batch<'a>,
    pub validation: Batch<'a>,
    pub spec: FitnessSpec,
    pub loss: Loss,
}

pub fn loss_for(measure: Measure) -> Loss {
    match measure {
        Measure::Sqe | Measure::Prechelt => Loss::Sqe,
        Measure::Abs => Loss::Abs,
        Measure::Exp => Loss::Exp,
    }
}

impl Context<'_> {
    /// Error on the validation view.
    pub fn evaluate(&self, genome: &Genome) -> Result<f64> {
        let net = Network::from_genome(genome, self.config.activation)?;
        let e = net.error(self.validation, &self.spec)?;
        if e.is_nan() {
            return Err(Error::Numeric("evaluation produced NaN".into()));
        }
        Ok(e)
    }

    /// Partial training with a fresh optimizer. Divergence leaves the genome
    /// untouched.
    pub fn train(&self, genome: &Genome) -> Result<(Genome, f64)> {
        let t = &self.config.trainer;
        let net = Network::from_genome(genome, self.config.activation)?;
        let mut opt = OptimizerState::new(t.optimizer, t.schedule, t.momentum, net.weights.len())?;
        let data = TrainingData { train: self.train, validation: self.validation, spec: &self.spec };
        match partial_train_bp(&net, data, self.loss, t.epochs, &mut opt) {
            Ok(out) => {
                let mut g = genome.clone();
                out.network.write_back(&mut g)?;
                Ok((g, out.error_after))
            }
            Err(Error::Numeric(msg)) => {
                log::debug!("training diverged ({msg}); keeping weights");
                Ok((genome.clone(), self.evaluate(genome)?))
            }
            Err(e) => Err(e),
        }
    }
}
