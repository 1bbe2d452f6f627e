use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::data::Batch;
use crate::error::{check_len, Error, Result};
use crate::fitness::FitnessSpec;
use crate::genome::{Genome, MatrixGenome, NeuronRole, GeneListGenome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Sigmoid,
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the pre-activation and activation values.
    pub fn derivative(self, _pre: f64, act: f64) -> f64 {
        match self {
            Activation::Sigmoid => act * (1.0 - act),
            Activation::Tanh => 1.0 - act * act,
            Activation::Identity => 1.0,
        }
    }
}

/// Where a network weight lives in the genome it was decoded from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConnKey {
    Matrix { from: usize, to: usize },
    /// Index into `GeneListGenome::connections`.
    Gene(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node {
    /// Matrix index or gene-list neuron id.
    pub id: u64,
    pub role: NeuronRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub from: usize,
    pub to: usize,
}

/// Feedforward phenotype: nodes in topological order, one weight per link.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    pub weights: Vec<f64>,
    pub keys: Vec<ConnKey>,
    pub activation: Activation,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    incoming: Vec<Vec<usize>>,
}

/// Per-node values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub pre: Vec<f64>,
    pub act: Vec<f64>,
}

/// Differentiable per-output losses used for training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    Sqe,
    Abs,
    Exp,
}

impl Loss {
    pub fn value(self, target: f64, actual: f64) -> f64 {
        let d = target - actual;
        match self {
            Loss::Sqe => d * d,
            Loss::Abs => d.abs(),
            Loss::Exp => d.abs().exp(),
        }
    }

    /// d loss / d actual; the absolute value's subgradient at 0 is 0.
    pub fn derivative(self, target: f64, actual: f64) -> f64 {
        let diff = actual - target;
        let sign = if diff > 0.0 {
            1.0
        } else if diff < 0.0 {
            -1.0
        } else {
            0.0
        };
        match self {
            Loss::Sqe => 2.0 * diff,
            Loss::Abs => sign,
            Loss::Exp => diff.abs().exp() * sign,
        }
    }
}

struct RawGraph {
    nodes: Vec<Node>,
    edges: Vec<(u64, u64, f64, ConnKey)>,
}

impl Network {
    pub fn from_genome(genome: &Genome, activation: Activation) -> Result<Self> {
        match genome {
            Genome::Matrix(m) => Self::from_matrix(m, activation),
            Genome::Genelist(g) => Self::from_genelist(g, activation),
            Genome::Bitstring(b) => Self::from_matrix(&b.decode()?, activation),
        }
    }

    pub fn from_matrix(m: &MatrixGenome, activation: Activation) -> Result<Self> {
        let dim = m.dim();
        let nodes = (0..dim)
            .filter(|&i| m.exists(i))
            .map(|i| Node {
                id: i as u64,
                role: match m.kind(i) {
                    crate::genome::NeuronKind::Input => NeuronRole::Input,
                    crate::genome::NeuronKind::Hidden => NeuronRole::Hidden,
                    crate::genome::NeuronKind::Output => NeuronRole::Output,
                },
            })
            .collect();
        let mut edges = Vec::new();
        for (from, to) in m.connections() {
            if !m.exists(from) || !m.exists(to) {
                return Err(Error::InvalidGenome(format!(
                    "connection ({from},{to}) touches a missing neuron"
                )));
            }
            edges.push((from as u64, to as u64, m.weight(from, to), ConnKey::Matrix { from, to }));
        }
        Self::assemble(RawGraph { nodes, edges }, activation)
    }

    pub fn from_genelist(g: &GeneListGenome, activation: Activation) -> Result<Self> {
        let mut nodes: Vec<Node> = g
            .neurons
            .iter()
            .map(|n| Node { id: u64::from(n.id), role: n.role })
            .collect();
        nodes.sort_by_key(|n| n.id);
        let known: HashSet<u64> = nodes.iter().map(|n| n.id).collect();
        let mut edges = Vec::new();
        for (idx, c) in g.connections.iter().enumerate() {
            if !c.enabled {
                continue;
            }
            let (a, b) = (u64::from(c.in_id), u64::from(c.out_id));
            if !known.contains(&a) || !known.contains(&b) {
                return Err(Error::InvalidGenome(format!(
                    "connection {a}->{b} references a missing neuron"
                )));
            }
            edges.push((a, b, c.weight, ConnKey::Gene(idx)));
        }
        Self::assemble(RawGraph { nodes, edges }, activation)
    }

    /// Prunes hidden nodes that are neither reachable from an input nor able
    /// to reach an output, then orders the rest topologically. Ties are broken
    /// by the genome's own node order, so the result is deterministic.
    fn assemble(raw: RawGraph, activation: Activation) -> Result<Self> {
        let pos: HashMap<u64, usize> = raw.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let count = raw.nodes.len();
        let mut fwd = vec![Vec::new(); count];
        let mut bwd = vec![Vec::new(); count];
        for &(a, b, _, _) in &raw.edges {
            fwd[pos[&a]].push(pos[&b]);
            bwd[pos[&b]].push(pos[&a]);
        }
        let flood = |starts: Vec<usize>, adj: &Vec<Vec<usize>>| {
            let mut seen = vec![false; count];
            let mut stack = starts;
            while let Some(v) = stack.pop() {
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(adj[v].iter().copied());
                }
            }
            seen
        };
        let role_starts = |role| {
            raw.nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| n.role == role)
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        };
        let from_input = flood(role_starts(NeuronRole::Input), &fwd);
        let to_output = flood(role_starts(NeuronRole::Output), &bwd);
        let keep: Vec<bool> = raw
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| n.role != NeuronRole::Hidden || from_input[i] || to_output[i])
            .collect();

        // Kahn's algorithm over kept nodes, lowest original position first.
        let mut indeg = vec![0usize; count];
        for &(a, b, _, _) in &raw.edges {
            if keep[pos[&a]] && keep[pos[&b]] {
                indeg[pos[&b]] += 1;
            }
        }
        let mut ready: BTreeSet<usize> = (0..count).filter(|&i| keep[i] && indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(count);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &w in &fwd[v] {
                if keep[w] {
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        ready.insert(w);
                    }
                }
            }
        }
        let kept = keep.iter().filter(|&&k| k).count();
        if order.len() != kept {
            return Err(Error::CyclicGenome);
        }
        let mut new_pos = vec![usize::MAX; count];
        for (p, &v) in order.iter().enumerate() {
            new_pos[v] = p;
        }
        let nodes: Vec<Node> = order.iter().map(|&v| raw.nodes[v]).collect();
        let mut links = Vec::new();
        let mut weights = Vec::new();
        let mut keys = Vec::new();
        for &(a, b, w, key) in &raw.edges {
            let (pa, pb) = (pos[&a], pos[&b]);
            if keep[pa] && keep[pb] {
                links.push(Link { from: new_pos[pa], to: new_pos[pb] });
                weights.push(w);
                keys.push(key);
            }
        }
        // Inputs and outputs in genome order (ascending id), not topological order.
        let mut by_id: Vec<(u64, usize, NeuronRole)> =
            nodes.iter().enumerate().map(|(p, n)| (n.id, p, n.role)).collect();
        by_id.sort_unstable_by_key(|t| (t.0, t.1));
        let pick = |role| by_id.iter().filter(|t| t.2 == role).map(|t| t.1).collect::<Vec<_>>();
        let inputs = pick(NeuronRole::Input);
        let outputs = pick(NeuronRole::Output);
        let mut incoming = vec![Vec::new(); nodes.len()];
        for (l, link) in links.iter().enumerate() {
            incoming[link.to].push(l);
        }
        Ok(Self { nodes, links, weights, keys, activation, inputs, outputs, incoming })
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn input_positions(&self) -> &[usize] {
        &self.inputs
    }

    pub fn output_positions(&self) -> &[usize] {
        &self.outputs
    }

    /// Forward pass with an explicit weight vector (for look-ahead gradients).
    pub fn trace_with(&self, weights: &[f64], input: &[f64]) -> Result<ForwardTrace> {
        check_len(self.inputs.len(), input.len())?;
        check_len(self.links.len(), weights.len())?;
        let n = self.nodes.len();
        let mut pre = vec![0.0; n];
        let mut act = vec![0.0; n];
        for (&p, &x) in self.inputs.iter().zip(input) {
            pre[p] = x;
            act[p] = x;
        }
        for v in 0..n {
            if self.nodes[v].role == NeuronRole::Input {
                continue;
            }
            let mut sum = 0.0;
            for &l in &self.incoming[v] {
                sum += weights[l] * act[self.links[l].from];
            }
            pre[v] = sum;
            act[v] = self.activation.apply(sum);
        }
        Ok(ForwardTrace { pre, act })
    }

    pub fn trace(&self, input: &[f64]) -> Result<ForwardTrace> {
        self.trace_with(&self.weights, input)
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        let t = self.trace(input)?;
        Ok(self.outputs.iter().map(|&p| t.act[p]).collect())
    }

    /// Gradient of one pattern's loss with respect to every link weight.
    pub fn pattern_gradient_with(
        &self,
        weights: &[f64],
        input: &[f64],
        target: &[f64],
        loss: Loss,
    ) -> Result<Vec<f64>> {
        check_len(self.outputs.len(), target.len())?;
        let t = self.trace_with(weights, input)?;
        let n = self.nodes.len();
        let mut dact = vec![0.0; n];
        for (&p, &y) in self.outputs.iter().zip(target) {
            dact[p] += loss.derivative(y, t.act[p]);
        }
        let mut grad = vec![0.0; self.links.len()];
        for v in (0..n).rev() {
            if self.nodes[v].role == NeuronRole::Input {
                continue;
            }
            let dpre = dact[v] * self.activation.derivative(t.pre[v], t.act[v]);
            if dpre == 0.0 {
                continue;
            }
            for &l in &self.incoming[v] {
                let from = self.links[l].from;
                grad[l] += dpre * t.act[from];
                dact[from] += weights[l] * dpre;
            }
        }
        Ok(grad)
    }

    pub fn gradient_with(&self, weights: &[f64], batch: Batch<'_>, loss: Loss) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::Data("gradient over an empty batch".into()));
        }
        let mut total = vec![0.0; self.links.len()];
        for (x, t) in batch.iter() {
            let g = self.pattern_gradient_with(weights, x, t, loss)?;
            for (acc, gi) in total.iter_mut().zip(g) {
                *acc += gi;
            }
        }
        Ok(total)
    }

    /// Summed-loss gradient over the batch.
    pub fn backprop_gradients(&self, batch: Batch<'_>, loss: Loss) -> Result<Vec<f64>> {
        self.gradient_with(&self.weights, batch, loss)
    }

    /// Summed loss over the batch.
    pub fn loss(&self, batch: Batch<'_>, loss: Loss) -> Result<f64> {
        let mut total = 0.0;
        for (x, t) in batch.iter() {
            let out = self.forward(x)?;
            check_len(t.len(), out.len())?;
            total += t.iter().zip(&out).map(|(&y, &a)| loss.value(y, a)).sum::<f64>();
        }
        Ok(total)
    }

    /// Configured error measure over a batch, outputs flattened pattern by pattern.
    pub fn error(&self, batch: Batch<'_>, spec: &FitnessSpec) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::Data("error over an empty batch".into()));
        }
        let mut targets = Vec::with_capacity(batch.len() * self.outputs.len());
        let mut actuals = Vec::with_capacity(targets.capacity());
        for (x, t) in batch.iter() {
            targets.extend_from_slice(t);
            actuals.extend(self.forward(x)?);
        }
        spec.error(&targets, &actuals)
    }

    /// Copies the network's weights into the genome it was built from.
    pub fn write_back(&self, genome: &mut Genome) -> Result<()> {
        match genome {
            Genome::Matrix(m) => {
                for (key, &w) in self.keys.iter().zip(&self.weights) {
                    let ConnKey::Matrix { from, to } = *key else {
                        return Err(Error::InvalidGenome("weight key does not match genome".into()));
                    };
                    m.weights[from][to] = w;
                }
                Ok(())
            }
            Genome::Genelist(g) => {
                for (key, &w) in self.keys.iter().zip(&self.weights) {
                    let ConnKey::Gene(idx) = *key else {
                        return Err(Error::InvalidGenome("weight key does not match genome".into()));
                    };
                    g.connections[idx].weight = w;
                }
                Ok(())
            }
            Genome::Bitstring(_) => Err(Error::Parameter(
                "bit-string weights are quantized and cannot take trained values".into(),
            )),
        }
    }
}
