//! Neuroevolution of feedforward network topologies and weights.
//!
//! Three genome encodings (variable-granularity bit strings, connectivity
//! matrices with a hidden-neuron existence vector, and innovation-numbered
//! gene lists) are evolved by three generation loops:
//!
//! * bit strings: random pairing, n-point crossover on fixed-width storage
//!   and three-rate bit mutation;
//! * matrices: a hybrid per-individual pipeline of partial backpropagation,
//!   simulated annealing and ordered structural mutation;
//! * gene lists: innovation-aligned crossover, temperature-scaled weight
//!   perturbation, connection addition and connection splitting.
//!
//! The [`dlopt`] module holds the gradient-training toolkit (momentum,
//! Nesterov, learning-rate decay, whitening, local contrastive
//! normalization, batch normalization, dropout).

pub mod data;
pub mod dlopt;
pub mod engine;
pub mod error;
pub mod fitness;
pub mod genome;
pub mod harness;
pub mod phenotype;
pub mod rng;
pub mod selection;
pub mod variation;

pub use data::{Batch, Dataset, Patterns, Split};
pub use engine::{
    evolve, Checkpoint, Encoding, Evolution, EvolutionConfig, EvolutionOutcome, GenerationReport,
    Individual, StopReason,
};
pub use error::{Error, Result};
pub use fitness::{FitnessSpec, Measure};
pub use genome::{BitStringGenome, GeneListGenome, Genome, MatrixGenome};
pub use phenotype::{build_network, Activation, Network};
