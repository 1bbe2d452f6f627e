use serde::{Deserialize, Serialize};

use crate::dlopt::{LrSchedule, OptimizerKind};
use crate::fitness::Measure;
use crate::phenotype::{Activation, SaSchedule};
use crate::selection::SelectionStrategy;
use crate::variation::BitMutationRates;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Bitstring,
    Matrix,
    Genelist,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitnessConfig {
    pub measure: Measure,
    pub o_max: f64,
    pub o_min: f64,
}

impl Default for FitnessConfig {
    fn default() -> Self {
        Self { measure: Measure::Sqe, o_max: 1.0, o_min: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitConfig {
    /// Hidden capacity of matrix genomes.
    pub max_hidden: usize,
    pub hidden: (usize, usize),
    pub connections: (usize, usize),
    pub weights: (f64, f64),
    /// Hidden neurons of the fixed bit-string topology.
    pub bitstring_hidden: usize,
    pub granularity: (usize, usize),
    pub g_max: usize,
    pub w_lo: i64,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self {
            max_hidden: 8,
            hidden: (1, 4),
            connections: (4, 16),
            weights: (-0.5, 0.5),
            bitstring_hidden: 2,
            granularity: (3, 4),
            g_max: 4,
            w_lo: -4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorConfig {
    /// Variance proportion of the Gaussian weight perturbation.
    pub alpha: f64,
    pub delete_neurons: (usize, usize),
    pub delete_connections: (usize, usize),
    pub add_connections: (usize, usize),
    pub add_neurons: (usize, usize),
    /// Gene-list connection additions per offspring.
    pub add_connection: (usize, usize),
    /// Gene-list connection splits per offspring.
    pub split_connection: (usize, usize),
    pub crossover_rate: f64,
    pub crossover_points: usize,
    pub bit_rates: BitMutationRates,
    /// Learning-rate factor inside the connection importance statistic.
    pub eta: f64,
    /// Initial weights of connections added to matrix genomes.
    pub init_interval: (f64, f64),
    pub cell_division_alpha: f64,
    pub neat_weight_interval: (f64, f64),
    pub dedupe_innovations: bool,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            delete_neurons: (1, 2),
            delete_connections: (1, 3),
            add_connections: (1, 3),
            add_neurons: (1, 2),
            add_connection: (0, 4),
            split_connection: (0, 4),
            crossover_rate: 0.25,
            crossover_points: 2,
            bit_rates: BitMutationRates { p_granularity: 0.05, p_connectivity: 0.02, p_weight: 0.02 },
            eta: 0.5,
            init_interval: (-0.1, 0.1),
            cell_division_alpha: 0.4,
            neat_weight_interval: (-1.0, 1.0),
            dedupe_innovations: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    /// Partial-training length; 0 disables gradient training in the
    /// gene-list and bit-string loops.
    pub epochs: usize,
    pub optimizer: OptimizerKind,
    pub momentum: f64,
    pub schedule: LrSchedule,
    pub sa: SaSchedule,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            optimizer: OptimizerKind::Momentum,
            momentum: 0.9,
            schedule: LrSchedule::constant(0.5),
            sa: SaSchedule::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StopConfig {
    /// Stop once the best error drops strictly below this value.
    pub target_error: Option<f64>,
    pub stagnation_window: usize,
    pub min_improvement: f64,
}

impl Default for StopConfig {
    fn default() -> Self {
        Self { target_error: None, stagnation_window: 50, min_improvement: 1e-6 }
    }
}

fn default_true() -> bool {
    true
}

fn default_selection() -> SelectionStrategy {
    SelectionStrategy::Rank
}

/// Everything that determines a run, given the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub encoding: Encoding,
    pub population_size: usize,
    /// Offspring produced per generation; defaults to the population size.
    #[serde(default)]
    pub offspring_per_generation: Option<usize>,
    pub max_generations: usize,
    #[serde(default)]
    pub fitness: FitnessConfig,
    #[serde(default = "default_selection")]
    pub selection: SelectionStrategy,
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default)]
    pub operators: OperatorConfig,
    #[serde(default)]
    pub trainer: TrainerConfig,
    #[serde(default)]
    pub stop: StopConfig,
    /// Append a constant 1.0 input to every pattern.
    #[serde(default = "default_true")]
    pub bias_input: bool,
    #[serde(default)]
    pub activation: Activation,
    pub seed: u64,
}

impl EvolutionConfig {
    pub fn new(encoding: Encoding, population_size: usize, max_generations: usize, seed: u64) -> Self {
        Self {
            encoding,
            population_size,
            offspring_per_generation: None,
            max_generations,
            fitness: FitnessConfig::default(),
            selection: match encoding {
                Encoding::Bitstring => SelectionStrategy::RandomPair,
                _ => SelectionStrategy::Rank,
            },
            init: InitConfig::default(),
            operators: OperatorConfig::default(),
            trainer: TrainerConfig::default(),
            stop: StopConfig::default(),
            bias_input: true,
            activation: Activation::Sigmoid,
            seed,
        }
    }

    pub fn offspring(&self) -> usize {
        self.offspring_per_generation.unwrap_or(self.population_size)
    }

    /// Every violated constraint, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let mut need = |ok: bool, msg: &str| {
            if !ok {
                v.push(msg.to_string());
            }
        };
        need(self.population_size >= 2, "population_size must be ≥ 2");
        need(self.max_generations >= 1, "max_generations must be ≥ 1");
        need(self.offspring() >= 1, "offspring_per_generation must be ≥ 1");
        if self.fitness.measure == Measure::Prechelt {
            need(self.fitness.o_max > self.fitness.o_min, "fitness.o_max must exceed fitness.o_min");
        }
        let i = &self.init;
        need(i.hidden.0 <= i.hidden.1, "init.hidden must be an ordered interval");
        need(i.hidden.1 <= i.max_hidden, "init.hidden upper bound must not exceed init.max_hidden");
        need(i.connections.0 <= i.connections.1, "init.connections must be an ordered interval");
        need(i.weights.0 <= i.weights.1, "init.weights must be an ordered interval");
        need(i.g_max >= 2 && i.g_max <= 32, "init.g_max must lie in 2..=32");
        need(
            i.granularity.0 >= 2 && i.granularity.0 <= i.granularity.1 && i.granularity.1 <= i.g_max,
            "init.granularity must be an ordered interval inside 2..=g_max",
        );
        let o = &self.operators;
        need(o.alpha > 0.0, "operators.alpha must be > 0");
        for (name, (lo, hi)) in [
            ("delete_neurons", o.delete_neurons),
            ("delete_connections", o.delete_connections),
            ("add_connections", o.add_connections),
            ("add_neurons", o.add_neurons),
            ("add_connection", o.add_connection),
            ("split_connection", o.split_connection),
        ] {
            if lo > hi {
                v.push(format!("operators.{name} must be an ordered interval"));
            }
        }
        let o = &self.operators;
        let mut need = |ok: bool, msg: &str| {
            if !ok {
                v.push(msg.to_string());
            }
        };
        need((0.0..=1.0).contains(&o.crossover_rate), "operators.crossover_rate must lie in [0, 1]");
        need(o.crossover_points >= 1, "operators.crossover_points must be ≥ 1");
        need(o.bit_rates.validate().is_ok(), "operators.bit_rates must lie in [0, 1]");
        need(o.eta > 0.0, "operators.eta must be > 0");
        need(o.init_interval.0 <= o.init_interval.1, "operators.init_interval must be ordered");
        need(o.neat_weight_interval.0 <= o.neat_weight_interval.1, "operators.neat_weight_interval must be ordered");
        let t = &self.trainer;
        need(
            self.encoding != Encoding::Matrix || t.epochs >= 1,
            "trainer.epochs must be ≥ 1 for the matrix encoding",
        );
        need((0.0..1.0).contains(&t.momentum), "trainer.momentum must lie in [0, 1)");
        need(t.schedule.validate().is_ok(), "trainer.schedule is invalid");
        need(t.sa.validate().is_ok(), "trainer.sa requires t0 > t_min > 0, cooling in (0,1), sigma > 0");
        need(self.stop.stagnation_window >= 1, "stop.stagnation_window must be ≥ 1");
        v
    }
}

impl OperatorConfig {
    /// Count interval of a hybrid-pipeline structural operator.
    pub fn interval(&self, op: super::StructuralOp) -> (usize, usize) {
        use super::StructuralOp::*;
        match op {
            DeleteNeurons => self.delete_neurons,
            DeleteConnections => self.delete_connections,
            AddConnections => self.add_connections,
            AddNeurons => self.add_neurons,
        }
    }
}
