use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{fitness_of_error, mark};
use crate::genome::{Genome, MatrixGenome};
use crate::phenotype::{train_sa, Network};
use crate::variation::{
    add_connections, cell_division, delete_connections, delete_neurons, instantaneous_temperature,
    structural_mutation_count, temperature,
};

use super::context::Context;
use super::individual::Individual;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuralOp {
    DeleteNeurons,
    DeleteConnections,
    AddConnections,
    AddNeurons,
}

impl StructuralOp {
    /// The order in which structural mutations are tried.
    pub const ORDER: [StructuralOp; 4] = [
        StructuralOp::DeleteNeurons,
        StructuralOp::DeleteConnections,
        StructuralOp::AddConnections,
        StructuralOp::AddNeurons,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StructuralOp::DeleteNeurons => "delete_neurons",
            StructuralOp::DeleteConnections => "delete_connections",
            StructuralOp::AddConnections => "add_connections",
            StructuralOp::AddNeurons => "add_neurons",
        }
    }

    pub fn is_deletion(self) -> bool {
        matches!(self, StructuralOp::DeleteNeurons | StructuralOp::DeleteConnections)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpnetPath {
    /// Parent was marked success: partial training only.
    Train,
    /// Annealing alone reduced the error.
    Anneal,
    /// Structural mutation was reached.
    Structural,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralAttempt {
    pub op: StructuralOp,
    pub count: usize,
    pub error_after: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpnetTrace {
    pub parent: u64,
    pub path: EpnetPath,
    /// Operators visited, in visiting order, including those that drew a
    /// zero count or could not apply.
    pub visited: Vec<StructuralOp>,
    pub attempts: Vec<StructuralAttempt>,
}

impl EpnetTrace {
    /// True when no addition was attempted before a deletion.
    pub fn order_respected(&self) -> bool {
        let rank = |op: StructuralOp| StructuralOp::ORDER.iter().position(|&o| o == op).unwrap_or(usize::MAX);
        self.visited.windows(2).all(|w| rank(w[0]) < rank(w[1]))
            && self.attempts.windows(2).all(|w| rank(w[0].op) < rank(w[1].op))
    }
}

fn matrix_of(genome: &Genome) -> Result<&MatrixGenome> {
    match genome {
        Genome::Matrix(m) => Ok(m),
        other => Err(Error::InvalidGenome(format!(
            "hybrid pipeline needs a matrix genome, got {}",
            other.kind_name()
        ))),
    }
}

fn apply_op<R: Rng + ?Sized>(
    ctx: &Context<'_>,
    op: StructuralOp,
    base: &MatrixGenome,
    count: usize,
    rng: &mut R,
) -> Result<Option<MatrixGenome>> {
    let ops = &ctx.config.operators;
    let act = ctx.config.activation;
    let out = match op {
        StructuralOp::DeleteNeurons => {
            if base.hidden_count() == 0 {
                return Ok(None);
            }
            delete_neurons(base, count, rng)
        }
        StructuralOp::DeleteConnections => {
            if base.connection_count() == 0 {
                return Ok(None);
            }
            delete_connections(base, count, ctx.validation, ops.eta, act)?
        }
        StructuralOp::AddConnections => {
            match add_connections(base, count, ctx.validation, ops.eta, ops.init_interval, act, rng) {
                Ok(g) => g,
                Err(Error::ExhaustedSlots) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        StructuralOp::AddNeurons => {
            let mut g = base.clone();
            let mut added = 0;
            for _ in 0..count {
                if g.hidden_count() >= g.max_hidden {
                    break;
                }
                let hidden = g.existing_hidden();
                g = if hidden.is_empty() {
                    // nothing to divide: open the first free slot unconnected
                    let slot = (0..g.max_hidden).find(|&k| g.hidden_exists[k] == 0).expect("capacity checked");
                    g.hidden_exists[slot] = 1;
                    g
                } else {
                    let v = hidden[rng.random_range(0..hidden.len())];
                    cell_division(&g, v, ops.cell_division_alpha)?
                };
                added += 1;
            }
            if added == 0 {
                return Ok(None);
            }
            g
        }
    };
    Ok(Some(out))
}

/// One pass of the hybrid pipeline for a matrix individual.
///
/// A success-marked parent is only trained further. Otherwise the weights
/// are annealed; if that fails to lower the error the structural operators
/// are tried in [`StructuralOp::ORDER`], each candidate partially trained.
/// The first candidate that beats the parent is kept, else the last one.
pub fn epnet_step<R: Rng + ?Sized>(
    parent: &Individual,
    child_id: u64,
    ctx: &Context<'_>,
    rng: &mut R,
) -> Result<(Individual, EpnetTrace)> {
    let base = matrix_of(&parent.genome)?;
    let mut trace = EpnetTrace { parent: parent.id, path: EpnetPath::Train, visited: vec![], attempts: vec![] };
    let child = |genome: Genome, error: f64, success: bool| Individual {
        id: child_id,
        genome,
        error,
        success: Some(success),
        lineage: vec![parent.id],
    };

    if parent.success == Some(true) {
        let (genome, after) = ctx.train(&parent.genome)?;
        let ok = mark(parent.error, after)?;
        return Ok((child(genome, after, ok), trace));
    }

    trace.path = EpnetPath::Anneal;
    let net = Network::from_matrix(base, ctx.config.activation)?;
    let sa = train_sa(&net, ctx.train, &ctx.spec, &ctx.config.trainer.sa, rng)?;
    let mut annealed = parent.genome.clone();
    sa.network.write_back(&mut annealed)?;
    let sa_error = ctx.evaluate(&annealed)?;
    if mark(parent.error, sa_error)? {
        return Ok((child(annealed, sa_error, true), trace));
    }

    trace.path = EpnetPath::Structural;
    let base = matrix_of(&annealed)?.clone();
    let t = temperature(fitness_of_error(parent.error), 1.0)?;
    let mut last: Option<(Genome, f64)> = None;
    for op in StructuralOp::ORDER {
        trace.visited.push(op);
        let (lo, hi) = ctx.config.operators.interval(op);
        let t_inst = instantaneous_temperature(t, rng);
        let count = structural_mutation_count(lo, hi, t_inst, rng);
        if count == 0 {
            continue;
        }
        let Some(candidate) = apply_op(ctx, op, &base, count, rng)? else {
            continue;
        };
        let (trained, error) = ctx.train(&Genome::Matrix(candidate))?;
        let accepted = error < parent.error;
        trace.attempts.push(StructuralAttempt { op, count, error_after: error, accepted });
        if accepted {
            return Ok((child(trained, error, true), trace));
        }
        last = Some((trained, error));
    }
    let (genome, error) = last.unwrap_or((annealed, sa_error));
    Ok((child(genome, error, false), trace))
}
