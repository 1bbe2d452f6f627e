//! Gene-list operators: innovation bookkeeping, connection addition,
//! connection splitting and innovation-aligned crossover.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{ConnectionGene, GeneListGenome, NeuronGene, NeuronRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationKind {
    Initial,
    AddConnection,
    SplitIn,
    SplitOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnovationRecord {
    pub innovation: u64,
    pub kind: MutationKind,
    pub in_id: u32,
    pub out_id: u32,
}

/// Single-writer source of innovation numbers and neuron ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnovationRegistry {
    next_innovation: u64,
    next_neuron: u32,
    /// Reuse the number of an identical earlier mutation instead of
    /// incrementing.
    pub dedupe: bool,
    pub history: Vec<InnovationRecord>,
}

impl InnovationRegistry {
    /// Registry matching [`GeneListGenome::minimal`] for `m` inputs and `n` outputs.
    pub fn for_minimal(inputs: usize, outputs: usize) -> Self {
        let (m, n) = (inputs as u32, outputs as u32);
        let mut history = Vec::new();
        let mut innovation = 0;
        for in_id in 1..=m {
            for out_id in m + 1..=m + n {
                innovation += 1;
                history.push(InnovationRecord { innovation, kind: MutationKind::Initial, in_id, out_id });
            }
        }
        Self { next_innovation: innovation + 1, next_neuron: m + n + 1, dedupe: false, history }
    }

    pub fn peek_innovation(&self) -> u64 {
        self.next_innovation
    }

    pub fn peek_neuron(&self) -> u32 {
        self.next_neuron
    }

    pub fn assign(&mut self, kind: MutationKind, in_id: u32, out_id: u32) -> u64 {
        if self.dedupe {
            if let Some(r) = self
                .history
                .iter()
                .find(|r| r.kind == kind && r.in_id == in_id && r.out_id == out_id)
            {
                return r.innovation;
            }
        }
        let innovation = self.next_innovation;
        self.next_innovation += 1;
        self.history.push(InnovationRecord { innovation, kind, in_id, out_id });
        innovation
    }

    pub fn new_neuron_id(&mut self) -> u32 {
        let id = self.next_neuron;
        self.next_neuron += 1;
        id
    }

    /// Checks that the counters are ahead of everything in `genome`.
    pub fn covers(&self, genome: &GeneListGenome) -> bool {
        genome.max_innovation() < self.next_innovation && genome.max_neuron_id() < self.next_neuron
    }
}

/// Adds one gene between a uniformly chosen absent pair that keeps the
/// enabled graph acyclic. Targets are never inputs and sources never outputs.
pub fn neat_add_connection<R: Rng + ?Sized>(
    genome: &GeneListGenome,
    registry: &mut InnovationRegistry,
    rng: &mut R,
    weight_interval: (f64, f64),
) -> Result<GeneListGenome> {
    let mut ids: Vec<(u32, NeuronRole)> = genome.neurons.iter().map(|n| (n.id, n.role)).collect();
    ids.sort_unstable_by_key(|p| p.0);
    let existing: HashSet<(u32, u32)> = genome.connections.iter().map(|c| (c.in_id, c.out_id)).collect();
    // a -> b closes a cycle exactly when b already reaches a
    let downstream: HashMap<u32, HashSet<u32>> = ids
        .iter()
        .filter(|p| p.1 != NeuronRole::Input)
        .map(|&(b, _)| (b, genome.reachable_from(b)))
        .collect();
    let mut legal = Vec::new();
    for &(a, ra) in &ids {
        if ra == NeuronRole::Output {
            continue;
        }
        for &(b, rb) in &ids {
            if a == b || rb == NeuronRole::Input || existing.contains(&(a, b)) || downstream[&b].contains(&a) {
                continue;
            }
            legal.push((a, b));
        }
    }
    if legal.is_empty() {
        return Err(Error::ExhaustedSlots);
    }
    let (in_id, out_id) = legal[rng.random_range(0..legal.len())];
    let (lo, hi) = weight_interval;
    let weight = if lo == hi { lo } else { rng.random_range(lo..=hi) };
    let innovation = registry.assign(MutationKind::AddConnection, in_id, out_id);
    let mut out = genome.clone();
    out.connections.push(ConnectionGene { in_id, out_id, weight, enabled: true, innovation });
    Ok(out)
}

/// Disables gene `index` and routes it through a new hidden neuron: the
/// incoming half gets weight 1, the outgoing half the old weight.
pub fn neat_split_connection(
    genome: &GeneListGenome,
    registry: &mut InnovationRegistry,
    index: usize,
) -> Result<GeneListGenome> {
    let old = *genome
        .connections
        .get(index)
        .ok_or_else(|| Error::InvalidTarget(format!("no connection gene at index {index}")))?;
    if !old.enabled {
        return Err(Error::InvalidTarget(format!(
            "connection {}->{} is already disabled",
            old.in_id, old.out_id
        )));
    }
    let mut out = genome.clone();
    out.connections[index].enabled = false;
    let id = registry.new_neuron_id();
    out.neurons.push(NeuronGene { id, role: NeuronRole::Hidden });
    let inn_in = registry.assign(MutationKind::SplitIn, old.in_id, id);
    let inn_out = registry.assign(MutationKind::SplitOut, id, old.out_id);
    out.connections.push(ConnectionGene {
        in_id: old.in_id,
        out_id: id,
        weight: 1.0,
        enabled: true,
        innovation: inn_in,
    });
    out.connections.push(ConnectionGene {
        in_id: id,
        out_id: old.out_id,
        weight: old.weight,
        enabled: true,
        innovation: inn_out,
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignedRow {
    pub innovation: u64,
    pub a: Option<ConnectionGene>,
    pub b: Option<ConnectionGene>,
}

impl AlignedRow {
    pub fn is_matching(&self) -> bool {
        self.a.is_some() && self.b.is_some()
    }
}

/// Genes of two parents lined up by innovation number, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedTable {
    pub rows: Vec<AlignedRow>,
}

pub fn align_by_innovation(a: &GeneListGenome, b: &GeneListGenome) -> AlignedTable {
    let mut rows: Vec<AlignedRow> = Vec::with_capacity(a.connections.len() + b.connections.len());
    let mut sa = a.connections.clone();
    let mut sb = b.connections.clone();
    sa.sort_by_key(|g| g.innovation);
    sb.sort_by_key(|g| g.innovation);
    let (mut i, mut j) = (0, 0);
    while i < sa.len() || j < sb.len() {
        let row = match (sa.get(i), sb.get(j)) {
            (Some(x), Some(y)) if x.innovation == y.innovation => {
                i += 1;
                j += 1;
                AlignedRow { innovation: x.innovation, a: Some(*x), b: Some(*y) }
            }
            (Some(x), Some(y)) if x.innovation < y.innovation => {
                i += 1;
                AlignedRow { innovation: x.innovation, a: Some(*x), b: None }
            }
            (Some(x), None) => {
                i += 1;
                AlignedRow { innovation: x.innovation, a: Some(*x), b: None }
            }
            (_, Some(y)) => {
                j += 1;
                AlignedRow { innovation: y.innovation, a: None, b: Some(*y) }
            }
            (None, None) => unreachable!(),
        };
        rows.push(row);
    }
    AlignedTable { rows }
}

impl AlignedTable {
    pub fn matching(&self) -> usize {
        self.rows.iter().filter(|r| r.is_matching()).count()
    }

    /// One child: matching genes from a uniformly chosen parent, unmatched
    /// genes only from the fitter parent. Neuron genes come from the fitter
    /// parent.
    pub fn recombine<R: Rng + ?Sized>(
        &self,
        fitter: &GeneListGenome,
        a_is_fitter: bool,
        rng: &mut R,
    ) -> GeneListGenome {
        let mut connections = Vec::new();
        for row in &self.rows {
            match (row.a, row.b) {
                (Some(x), Some(y)) => connections.push(if rng.random::<bool>() { x } else { y }),
                (Some(x), None) if a_is_fitter => connections.push(x),
                (None, Some(y)) if !a_is_fitter => connections.push(y),
                _ => {}
            }
        }
        GeneListGenome { neurons: fitter.neurons.clone(), connections }
    }
}

const RECOMBINE_ATTEMPTS: usize = 16;

/// Innovation-aligned crossover. A child whose enabled genes form a cycle
/// is rejected and resampled; after repeated rejection the fitter parent is
/// returned unchanged.
pub fn crossover_genelist<R: Rng + ?Sized>(
    a: &GeneListGenome,
    a_error: f64,
    b: &GeneListGenome,
    b_error: f64,
    rng: &mut R,
) -> GeneListGenome {
    let a_is_fitter = a_error <= b_error;
    let fitter = if a_is_fitter { a } else { b };
    let table = align_by_innovation(a, b);
    for _ in 0..RECOMBINE_ATTEMPTS {
        let child = table.recombine(fitter, a_is_fitter, rng);
        if child.enabled_is_acyclic() {
            return child;
        }
    }
    fitter.clone()
}
