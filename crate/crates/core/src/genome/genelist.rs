//! Neuron-gene / connection-gene encoding with historical innovation numbers.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeuronRole {
    Input,
    Hidden,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeuronGene {
    pub id: u32,
    pub role: NeuronRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionGene {
    pub in_id: u32,
    pub out_id: u32,
    pub weight: f64,
    pub enabled: bool,
    pub innovation: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneListGenome {
    pub neurons: Vec<NeuronGene>,
    pub connections: Vec<ConnectionGene>,
}

/// Interval used for the random weights of freshly created genes.
pub const INITIAL_WEIGHT_RANGE: (f64, f64) = (-1.0, 1.0);

impl GeneListGenome {
    /// Inputs get ids `1..=m`, outputs `m+1..=m+n`, and every input is linked
    /// to every output with innovations `1..=m*n` in `(in, out)` order.
    pub fn minimal<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        assert!(inputs >= 1 && outputs >= 1, "need at least one input and one output");
        let m = inputs as u32;
        let n = outputs as u32;
        let mut neurons = Vec::with_capacity((m + n) as usize);
        neurons.extend((1..=m).map(|id| NeuronGene { id, role: NeuronRole::Input }));
        neurons.extend((m + 1..=m + n).map(|id| NeuronGene { id, role: NeuronRole::Output }));
        let mut connections = Vec::with_capacity((m * n) as usize);
        let mut innovation = 0;
        for in_id in 1..=m {
            for out_id in m + 1..=m + n {
                innovation += 1;
                connections.push(ConnectionGene {
                    in_id,
                    out_id,
                    weight: rng.random_range(INITIAL_WEIGHT_RANGE.0..=INITIAL_WEIGHT_RANGE.1),
                    enabled: true,
                    innovation,
                });
            }
        }
        Self { neurons, connections }
    }

    pub fn role_of(&self, id: u32) -> Option<NeuronRole> {
        self.neurons.iter().find(|n| n.id == id).map(|n| n.role)
    }

    pub fn ids_with_role(&self, role: NeuronRole) -> Vec<u32> {
        self.neurons.iter().filter(|n| n.role == role).map(|n| n.id).collect()
    }

    pub fn input_count(&self) -> usize {
        self.ids_with_role(NeuronRole::Input).len()
    }

    pub fn output_count(&self) -> usize {
        self.ids_with_role(NeuronRole::Output).len()
    }

    pub fn hidden_count(&self) -> usize {
        self.ids_with_role(NeuronRole::Hidden).len()
    }

    pub fn enabled_count(&self) -> usize {
        self.connections.iter().filter(|c| c.enabled).count()
    }

    pub fn max_innovation(&self) -> u64 {
        self.connections.iter().map(|c| c.innovation).max().unwrap_or(0)
    }

    pub fn max_neuron_id(&self) -> u32 {
        self.neurons.iter().map(|n| n.id).max().unwrap_or(0)
    }

    pub fn has_gene(&self, in_id: u32, out_id: u32) -> bool {
        self.connections
            .iter()
            .any(|c| c.in_id == in_id && c.out_id == out_id)
    }

    /// Whether a path `from ->* to` exists over enabled genes.
    pub fn reaches(&self, from: u32, to: u32) -> bool {
        reaches(self.connections.iter().filter(|c| c.enabled), from, to)
    }

    /// Every neuron reachable from `from` over enabled genes, `from` included.
    pub fn reachable_from(&self, from: u32) -> HashSet<u32> {
        let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
        for g in self.connections.iter().filter(|c| c.enabled) {
            adj.entry(g.in_id).or_default().push(g.out_id);
        }
        let mut stack = vec![from];
        let mut seen = HashSet::new();
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                if let Some(next) = adj.get(&v) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        seen
    }

    pub fn enabled_is_acyclic(&self) -> bool {
        is_acyclic(self.connections.iter().filter(|c| c.enabled))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGenome(msg));
        let mut roles = HashMap::new();
        for n in &self.neurons {
            if roles.insert(n.id, n.role).is_some() {
                return bad(format!("duplicate neuron id {}", n.id));
            }
        }
        if self.input_count() == 0 || self.output_count() == 0 {
            return bad("genome needs at least one input and one output neuron".into());
        }
        let mut innovations = HashSet::new();
        let mut pairs = HashSet::new();
        for c in &self.connections {
            if !innovations.insert(c.innovation) {
                return bad(format!("duplicate innovation number {}", c.innovation));
            }
            if !pairs.insert((c.in_id, c.out_id)) {
                return bad(format!("duplicate connection {}->{}", c.in_id, c.out_id));
            }
            match (roles.get(&c.in_id), roles.get(&c.out_id)) {
                (Some(src), Some(dst)) => {
                    if *dst == NeuronRole::Input || *src == NeuronRole::Output {
                        return bad(format!("connection {}->{} has an illegal direction", c.in_id, c.out_id));
                    }
                }
                _ => {
                    return bad(format!(
                        "connection {}->{} references a missing neuron",
                        c.in_id, c.out_id
                    ))
                }
            }
            if !c.weight.is_finite() {
                return bad(format!("non-finite weight on innovation {}", c.innovation));
            }
        }
        if !self.enabled_is_acyclic() {
            return Err(Error::CyclicGenome);
        }
        Ok(())
    }
}

pub(crate) fn reaches<'a>(
    genes: impl Iterator<Item = &'a ConnectionGene>,
    from: u32,
    to: u32,
) -> bool {
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for g in genes {
        adj.entry(g.in_id).or_default().push(g.out_id);
    }
    let mut stack = vec![from];
    let mut seen = HashSet::new();
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if seen.insert(v) {
            if let Some(next) = adj.get(&v) {
                stack.extend(next.iter().copied());
            }
        }
    }
    false
}

pub(crate) fn is_acyclic<'a>(genes: impl Iterator<Item = &'a ConnectionGene>) -> bool {
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut indeg: HashMap<u32, usize> = HashMap::new();
    for g in genes {
        adj.entry(g.in_id).or_default().push(g.out_id);
        indeg.entry(g.in_id).or_insert(0);
        *indeg.entry(g.out_id).or_insert(0) += 1;
    }
    let mut ready: Vec<u32> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let mut visited = 0;
    while let Some(v) = ready.pop() {
        visited += 1;
        if let Some(next) = adj.get(&v) {
            for &w in next {
                let d = indeg.get_mut(&w).expect("node registered");
                *d -= 1;
                if *d == 0 {
                    ready.push(w);
                }
            }
        }
    }
    visited == indeg.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn minimal_two_by_one() {
        let g = GeneListGenome::minimal(2, 1, &mut seeded(0));
        assert_eq!(g.neurons.len(), 3);
        assert_eq!(g.connections.len(), 2);
        let inn: Vec<u64> = g.connections.iter().map(|c| c.innovation).collect();
        assert_eq!(inn, vec![1, 2]);
        assert_eq!(g.hidden_count(), 0);
        g.validate().unwrap();
    }

    #[test]
    fn minimal_sizes() {
        let g = GeneListGenome::minimal(1, 1, &mut seeded(0));
        assert_eq!(g.connections.len(), 1);
        assert_eq!(g.connections[0].innovation, 1);

        let g = GeneListGenome::minimal(3, 2, &mut seeded(0));
        let inn: Vec<u64> = g.connections.iter().map(|c| c.innovation).collect();
        assert_eq!(inn, (1..=6).collect::<Vec<_>>());
        let pairs: Vec<(u32, u32)> = g.connections.iter().map(|c| (c.in_id, c.out_id)).collect();
        assert_eq!(pairs, vec![(1, 4), (1, 5), (2, 4), (2, 5), (3, 4), (3, 5)]);
        assert!(g.connections.iter().all(|c| c.weight.abs() <= 1.0 && c.enabled));
    }

    #[test]
    fn cycle_detection() {
        let mut g = GeneListGenome::minimal(1, 1, &mut seeded(0));
        g.neurons.push(NeuronGene { id: 3, role: NeuronRole::Hidden });
        g.neurons.push(NeuronGene { id: 4, role: NeuronRole::Hidden });
        let gene = |i, o, inn| ConnectionGene { in_id: i, out_id: o, weight: 0.1, enabled: true, innovation: inn };
        g.connections.push(gene(3, 4, 10));
        g.connections.push(gene(4, 3, 11));
        assert_eq!(g.validate(), Err(Error::CyclicGenome));
        g.connections[2].enabled = false;
        g.validate().unwrap();
    }

    #[test]
    fn rejects_duplicates_and_dangling() {
        let mut g = GeneListGenome::minimal(2, 1, &mut seeded(0));
        g.connections[1].innovation = 1;
        assert!(g.validate().is_err());

        let mut g = GeneListGenome::minimal(2, 1, &mut seeded(0));
        g.connections[0].out_id = 99;
        assert!(g.validate().is_err());
    }
}
