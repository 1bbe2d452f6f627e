use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::fitness::{FitnessSpec, Measure};
use crate::genome::{Genome, MatrixGenome, NeuronKind, NeuronRole};
use crate::phenotype::{Activation, Network};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeuronInfo {
    pub id: u64,
    pub role: NeuronRole,
    /// False when the neuron is pruned from the evaluated network.
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionInfo {
    pub from: u64,
    pub to: u64,
    pub weight: f64,
    pub enabled: bool,
    pub innovation: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InspectReport {
    pub kind: &'static str,
    pub granularity: Option<usize>,
    pub neurons: Vec<NeuronInfo>,
    pub connections: Vec<ConnectionInfo>,
}

fn role_of(kind: NeuronKind) -> NeuronRole {
    match kind {
        NeuronKind::Input => NeuronRole::Input,
        NeuronKind::Hidden => NeuronRole::Hidden,
        NeuronKind::Output => NeuronRole::Output,
    }
}

fn role_name(role: NeuronRole) -> &'static str {
    match role {
        NeuronRole::Input => "input",
        NeuronRole::Hidden => "hidden",
        NeuronRole::Output => "output",
    }
}

fn matrix_parts(m: &MatrixGenome, active: &HashSet<u64>) -> (Vec<NeuronInfo>, Vec<ConnectionInfo>) {
    let neurons = (0..m.dim())
        .filter(|&v| m.exists(v))
        .map(|v| NeuronInfo { id: v as u64, role: role_of(m.kind(v)), active: active.contains(&(v as u64)) })
        .collect();
    let connections = m
        .connections()
        .into_iter()
        .map(|(i, j)| ConnectionInfo {
            from: i as u64,
            to: j as u64,
            weight: m.weight(i, j),
            enabled: true,
            innovation: None,
        })
        .collect();
    (neurons, connections)
}

impl InspectReport {
    pub fn of(genome: &Genome) -> Result<Self> {
        genome.validate()?;
        let net = Network::from_genome(genome, Activation::Sigmoid)?;
        let active: HashSet<u64> = net.nodes.iter().map(|n| n.id).collect();
        let (granularity, neurons, connections) = match genome {
            Genome::Matrix(m) => {
                let (n, c) = matrix_parts(m, &active);
                (None, n, c)
            }
            Genome::Bitstring(b) => {
                let (n, c) = matrix_parts(&b.decode()?, &active);
                (Some(b.granularity()), n, c)
            }
            Genome::Genelist(g) => {
                let mut neurons: Vec<NeuronInfo> = g
                    .neurons
                    .iter()
                    .map(|n| NeuronInfo {
                        id: u64::from(n.id),
                        role: n.role,
                        active: active.contains(&u64::from(n.id)),
                    })
                    .collect();
                neurons.sort_by_key(|n| n.id);
                let connections = g
                    .connections
                    .iter()
                    .map(|c| ConnectionInfo {
                        from: u64::from(c.in_id),
                        to: u64::from(c.out_id),
                        weight: c.weight,
                        enabled: c.enabled,
                        innovation: Some(c.innovation),
                    })
                    .collect();
                (None, neurons, connections)
            }
        };
        Ok(Self { kind: genome.kind_name(), granularity, neurons, connections })
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let count = |r| self.neurons.iter().filter(|n| n.role == r).count();
        let _ = writeln!(s, "encoding: {}", self.kind);
        if let Some(g) = self.granularity {
            let _ = writeln!(s, "granularity: {g}");
        }
        let _ = writeln!(
            s,
            "neurons: {} (inputs {}, hidden {}, outputs {})",
            self.neurons.len(),
            count(NeuronRole::Input),
            count(NeuronRole::Hidden),
            count(NeuronRole::Output)
        );
        for n in self.neurons.iter().filter(|n| !n.active) {
            let _ = writeln!(s, "  neuron {} ({}) inactive", n.id, role_name(n.role));
        }
        let enabled = self.connections.iter().filter(|c| c.enabled).count();
        let _ = writeln!(s, "connections: {} (enabled {enabled})", self.connections.len());
        for c in &self.connections {
            let _ = write!(s, "  {} -> {} weight {}", c.from, c.to, c.weight);
            if let Some(i) = c.innovation {
                let _ = write!(s, " innovation {i}");
            }
            if !c.enabled {
                s.push_str(" disabled");
            }
            s.push('\n');
        }
        s
    }

    /// Graphviz description. Inactive neurons and disabled genes are dashed.
    pub fn dot(&self) -> String {
        let mut s = String::from("digraph genome {\n  rankdir=LR;\n");
        for n in &self.neurons {
            let shape = match n.role {
                NeuronRole::Input => "box",
                NeuronRole::Hidden => "ellipse",
                NeuronRole::Output => "doublecircle",
            };
            let style = if n.active { "" } else { ", style=dashed" };
            let _ = writeln!(s, "  n{} [label=\"{} {}\", shape={shape}{style}];", n.id, n.id, role_name(n.role));
        }
        for c in &self.connections {
            let style = if c.enabled { "" } else { ", style=dashed" };
            let _ = writeln!(s, "  n{} -> n{} [label=\"{:.4}\"{style}];", c.from, c.to, c.weight);
        }
        s.push_str("}\n");
        s
    }
}

pub fn read_genome(path: &Path) -> Result<Genome> {
    let genome: Genome = serde_json::from_str(&std::fs::read_to_string(path)?)
        .map_err(|e| Error::InvalidGenome(format!("{}: {e}", path.display())))?;
    genome.validate()?;
    Ok(genome)
}

pub fn inspect(path: &Path) -> Result<InspectReport> {
    InspectReport::of(&read_genome(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub error: f64,
    pub outputs: Vec<Vec<f64>>,
}

/// Error of `genome` over every pattern of `data`. A genome with exactly one
/// extra input is fed a constant 1.0 there.
pub fn evaluate_genome(genome: &Genome, data: &Dataset, measure: Measure) -> Result<EvalReport> {
    let data = if genome.input_count() == data.input_width() + 1 {
        data.with_bias_input()
    } else {
        data.clone()
    };
    if genome.input_count() != data.input_width() || genome.output_count() != data.target_width() {
        return Err(Error::Dimension { expected: genome.input_count(), actual: data.input_width() });
    }
    let all = data.all();
    let net = Network::from_genome(genome, Activation::Sigmoid)?;
    let spec = FitnessSpec::new(measure, 1.0, 0.0, data.target_width(), all.len())?;
    let outputs = all.inputs.iter().map(|x| net.forward(x)).collect::<Result<Vec<_>>>()?;
    Ok(EvalReport { error: net.error(all.batch(), &spec)?, outputs })
}
