use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::Batch;
use crate::dlopt::{LrSchedule, MomentumState, OptimizerKind};
use crate::error::{Error, Result};
use crate::fitness::FitnessSpec;
use crate::phenotype::network::{Loss, Network};

/// Training and validation views plus the error used for reporting.
#[derive(Debug, Clone, Copy)]
pub struct TrainingData<'a> {
    pub train: Batch<'a>,
    pub validation: Batch<'a>,
    pub spec: &'a FitnessSpec,
}

/// Optimizer bundle carried across partial-training calls.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub kind: OptimizerKind,
    pub schedule: LrSchedule,
    pub momentum: MomentumState,
    /// Epochs already consumed; drives the schedule.
    pub epoch: usize,
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, schedule: LrSchedule, momentum: f64, weights: usize) -> Result<Self> {
        schedule.validate()?;
        Ok(Self {
            kind,
            schedule,
            momentum: MomentumState::new(weights, momentum, schedule.initial())?,
            epoch: 0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpOutcome {
    pub network: Network,
    pub error_before: f64,
    pub error_after: f64,
}

/// Full-batch gradient training for `epochs` epochs on the training view.
/// Both reported errors use the configured measure on the validation view.
pub fn partial_train_bp(
    net: &Network,
    data: TrainingData<'_>,
    loss: Loss,
    epochs: usize,
    opt: &mut OptimizerState,
) -> Result<BpOutcome> {
    if data.train.is_empty() || data.validation.is_empty() {
        return Err(Error::Data("training needs nonempty train and validation sets".into()));
    }
    if epochs == 0 {
        return Err(Error::Parameter("epochs must be >= 1".into()));
    }
    if opt.momentum.velocity.len() != net.weights.len() {
        return Err(Error::Dimension {
            expected: net.weights.len(),
            actual: opt.momentum.velocity.len(),
        });
    }
    let error_before = net.error(data.validation, data.spec)?;
    let mut trained = net.clone();
    if !trained.weights.is_empty() {
        for _ in 0..epochs {
            opt.momentum.learning_rate = opt.schedule.lr_at(opt.epoch);
            let delta = match opt.kind {
                OptimizerKind::Momentum => {
                    let g = trained.backprop_gradients(data.train, loss)?;
                    opt.momentum.momentum_step(&g)?
                }
                OptimizerKind::Nesterov => {
                    let weights = trained.weights.clone();
                    let net_ref = &trained;
                    opt.momentum
                        .nesterov_step(&weights, |w| net_ref.gradient_with(w, data.train, loss))?
                }
            };
            for (w, d) in trained.weights.iter_mut().zip(delta) {
                *w += d;
            }
            opt.epoch += 1;
        }
    } else {
        opt.epoch += epochs;
    }
    if trained.weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Numeric("training diverged to a non-finite weight".into()));
    }
    let error_after = trained.error(data.validation, data.spec)?;
    Ok(BpOutcome { network: trained, error_before, error_after })
}

/// Geometric annealing schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaSchedule {
    pub t0: f64,
    pub cooling: f64,
    pub steps_per_temperature: usize,
    pub t_min: f64,
    pub proposal_sigma: f64,
}

impl Default for SaSchedule {
    fn default() -> Self {
        Self { t0: 0.1, cooling: 0.8, steps_per_temperature: 20, t_min: 0.001, proposal_sigma: 0.3 }
    }
}

impl SaSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > self.t_min && self.t_min > 0.0) {
            return Err(Error::Parameter("annealing needs t0 > t_min > 0".into()));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::Parameter("cooling factor must lie in (0, 1)".into()));
        }
        if !(self.proposal_sigma > 0.0) {
            return Err(Error::Parameter("proposal sigma must be positive".into()));
        }
        Ok(())
    }

    /// Temperatures visited, highest first.
    pub fn temperatures(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::successors(Some(self.t0), move |t| Some(t * self.cooling))
            .take_while(move |&t| t > self.t_min)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptStats {
    pub proposals: u64,
    pub accepted: u64,
    pub improving: u64,
    pub uphill_accepted: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaOutcome {
    pub network: Network,
    pub error_before: f64,
    pub error_after: f64,
    pub stats: AcceptStats,
}

/// Metropolis acceptance probability for an error change at temperature `t`.
pub fn acceptance_probability(delta: f64, t: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else if t <= 0.0 {
        0.0
    } else {
        (-delta / t).exp()
    }
}

pub fn metropolis_accept<R: Rng + ?Sized>(delta: f64, t: f64, rng: &mut R) -> bool {
    delta <= 0.0 || rng.random::<f64>() < acceptance_probability(delta, t)
}

/// Simulated annealing over the weights, objective = configured error on
/// `batch`. Each proposal perturbs one uniformly chosen weight by
/// `N(0, sigma^2)`. The best weights seen are returned, so the result is
/// never worse than the input.
pub fn train_sa<R: Rng + ?Sized>(
    net: &Network,
    batch: Batch<'_>,
    spec: &FitnessSpec,
    schedule: &SaSchedule,
    rng: &mut R,
) -> Result<SaOutcome> {
    schedule.validate()?;
    let error_before = net.error(batch, spec)?;
    let mut stats = AcceptStats::default();
    if net.weights.is_empty() {
        return Ok(SaOutcome { network: net.clone(), error_before, error_after: error_before, stats });
    }
    let normal = Normal::new(0.0, schedule.proposal_sigma)
        .map_err(|e| Error::Parameter(e.to_string()))?;
    let mut current = net.clone();
    let mut current_err = error_before;
    let mut best = net.weights.clone();
    let mut best_err = error_before;
    for t in schedule.temperatures() {
        for _ in 0..schedule.steps_per_temperature {
            let k = rng.random_range(0..current.weights.len());
            let old = current.weights[k];
            current.weights[k] = old + normal.sample(rng);
            let err = current.error(batch, spec)?;
            let delta = err - current_err;
            stats.proposals += 1;
            if err.is_finite() && metropolis_accept(delta, t, rng) {
                stats.accepted += 1;
                if delta <= 0.0 {
                    stats.improving += 1;
                } else {
                    stats.uphill_accepted += 1;
                }
                current_err = err;
                if err < best_err {
                    best_err = err;
                    best.clone_from(&current.weights);
                }
            } else {
                current.weights[k] = old;
            }
        }
    }
    current.weights = best;
    Ok(SaOutcome { network: current, error_before, error_after: best_err, stats })
}
