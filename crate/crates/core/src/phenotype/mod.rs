//! Genome decoding into evaluable feedforward networks, plus the two
//! weight trainers (gradient descent and simulated annealing).

mod network;
mod train;

pub use network::{Activation, ConnKey, ForwardTrace, Link, Loss, Network, Node};
pub use train::{
    acceptance_probability, metropolis_accept, partial_train_bp, train_sa, AcceptStats, BpOutcome,
    OptimizerState, SaOutcome, SaSchedule, TrainingData,
};

use crate::error::Result;
use crate::genome::Genome;

/// Decodes any genome variant with the default sigmoid activation.
pub fn build_network(genome: &Genome) -> Result<Network> {
    Network::from_genome(genome, Activation::Sigmoid)
}
