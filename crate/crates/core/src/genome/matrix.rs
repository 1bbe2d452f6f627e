//! Connectivity/weight matrix encoding with a hidden-neuron existence vector.
//!
//! Neuron indices are laid out as `[inputs | hidden capacity | outputs]`.
//! `connectivity[i][j] == 1` is a link from neuron `i` to neuron `j`; in
//! feedforward mode only `i < j` is legal, so the support is strictly upper
//! triangular.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeuronKind {
    Input,
    Hidden,
    Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixGenome {
    pub inputs: usize,
    pub max_hidden: usize,
    pub outputs: usize,
    pub connectivity: Vec<Vec<u8>>,
    pub weights: Vec<Vec<f64>>,
    pub hidden_exists: Vec<u8>,
}

/// Sampling ranges for random initialization (all bounds inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRanges {
    pub inputs: usize,
    pub outputs: usize,
    pub max_hidden: usize,
    pub hidden: (usize, usize),
    pub connections: (usize, usize),
    pub weights: (f64, f64),
}

impl MatrixGenome {
    pub fn empty(inputs: usize, max_hidden: usize, outputs: usize) -> Self {
        let dim = inputs + max_hidden + outputs;
        Self {
            inputs,
            max_hidden,
            outputs,
            connectivity: vec![vec![0; dim]; dim],
            weights: vec![vec![0.0; dim]; dim],
            hidden_exists: vec![0; max_hidden],
        }
    }

    pub fn dim(&self) -> usize {
        self.inputs + self.max_hidden + self.outputs
    }

    pub fn kind(&self, neuron: usize) -> NeuronKind {
        if neuron < self.inputs {
            NeuronKind::Input
        } else if neuron < self.inputs + self.max_hidden {
            NeuronKind::Hidden
        } else {
            NeuronKind::Output
        }
    }

    /// Matrix index of hidden slot `h`.
    pub fn hidden_index(&self, h: usize) -> usize {
        self.inputs + h
    }

    pub fn exists(&self, neuron: usize) -> bool {
        match self.kind(neuron) {
            NeuronKind::Hidden => self.hidden_exists[neuron - self.inputs] == 1,
            _ => true,
        }
    }

    pub fn is_connected(&self, from: usize, to: usize) -> bool {
        self.connectivity[from][to] == 1
    }

    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights[from][to]
    }

    pub fn connect(&mut self, from: usize, to: usize, weight: f64) {
        self.connectivity[from][to] = 1;
        self.weights[from][to] = weight;
    }

    pub fn disconnect(&mut self, from: usize, to: usize) {
        self.connectivity[from][to] = 0;
        self.weights[from][to] = 0.0;
    }

    /// Indices of hidden neurons that currently exist.
    pub fn existing_hidden(&self) -> Vec<usize> {
        (0..self.max_hidden)
            .filter(|&h| self.hidden_exists[h] == 1)
            .map(|h| self.hidden_index(h))
            .collect()
    }

    pub fn hidden_count(&self) -> usize {
        self.hidden_exists.iter().filter(|&&e| e == 1).count()
    }

    pub fn connection_count(&self) -> usize {
        self.connectivity
            .iter()
            .map(|row| row.iter().filter(|&&c| c == 1).count())
            .sum()
    }

    /// Present connections in row-major order.
    pub fn connections(&self) -> Vec<(usize, usize)> {
        let dim = self.dim();
        let mut out = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                if self.connectivity[i][j] == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Whether `from -> to` is a legal feedforward slot between existing
    /// neurons: upper triangular, never into an input, never out of an output.
    pub fn is_legal_slot(&self, from: usize, to: usize) -> bool {
        let dim = self.dim();
        from < to
            && to < dim
            && to >= self.inputs
            && self.kind(from) != NeuronKind::Output
            && self.exists(from)
            && self.exists(to)
    }

    /// All legal slots, connected or not, in row-major order.
    pub fn legal_slots(&self) -> Vec<(usize, usize)> {
        let dim = self.dim();
        let mut out = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                if self.is_legal_slot(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Legal slots that are currently absent.
    pub fn absent_slots(&self) -> Vec<(usize, usize)> {
        self.legal_slots()
            .into_iter()
            .filter(|&(i, j)| !self.is_connected(i, j))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let bad = |msg: String| Err(Error::InvalidGenome(msg));
        if self.connectivity.len() != dim || self.weights.len() != dim {
            return bad(format!("matrices must have {dim} rows"));
        }
        if self.connectivity.iter().any(|r| r.len() != dim)
            || self.weights.iter().any(|r| r.len() != dim)
        {
            return bad(format!("matrix rows must have {dim} columns"));
        }
        if self.hidden_exists.len() != self.max_hidden {
            return bad("existence vector length differs from hidden capacity".into());
        }
        if self.hidden_exists.iter().any(|&e| e > 1) {
            return bad("existence vector must be binary".into());
        }
        for i in 0..dim {
            for j in 0..dim {
                let c = self.connectivity[i][j];
                let w = self.weights[i][j];
                if c > 1 {
                    return bad("connectivity must be binary".into());
                }
                if !w.is_finite() {
                    return bad(format!("non-finite weight at ({i},{j})"));
                }
                if c == 0 && w != 0.0 {
                    return bad(format!("absent connection ({i},{j}) carries weight {w}"));
                }
                if c == 1 && !self.is_legal_slot(i, j) {
                    return bad(format!("connection ({i},{j}) is not a legal feedforward slot"));
                }
            }
        }
        Ok(())
    }

    /// Random genome with hidden and connection counts drawn uniformly from
    /// `ranges`, links placed uniformly among the legal slots.
    pub fn random<R: Rng + ?Sized>(ranges: &MatrixRanges, rng: &mut R) -> Result<Self> {
        let (h_lo, h_hi) = ranges.hidden;
        let (c_lo, c_hi) = ranges.connections;
        let (w_lo, w_hi) = ranges.weights;
        if h_lo > h_hi || c_lo > c_hi || w_lo > w_hi {
            return Err(Error::InfeasibleRange("a range has min > max".into()));
        }
        if h_hi > ranges.max_hidden {
            return Err(Error::InfeasibleRange(format!(
                "hidden maximum {h_hi} exceeds capacity {}",
                ranges.max_hidden
            )));
        }
        let max_slots = legal_slot_count(ranges.inputs, h_hi, ranges.outputs);
        if c_lo > max_slots {
            return Err(Error::InfeasibleRange(format!(
                "at least {c_lo} connections requested but only {max_slots} legal slots exist"
            )));
        }

        let mut g = Self::empty(ranges.inputs, ranges.max_hidden, ranges.outputs);
        let hidden = rng.random_range(h_lo..=h_hi);
        for h in sample(rng, ranges.max_hidden, hidden).into_vec() {
            g.hidden_exists[h] = 1;
        }
        let slots = g.legal_slots();
        let wanted = rng.random_range(c_lo..=c_hi).min(slots.len());
        let mut chosen = sample(rng, slots.len(), wanted).into_vec();
        chosen.sort_unstable();
        for k in chosen {
            let (i, j) = slots[k];
            let w = if w_lo == w_hi {
                w_lo
            } else {
                rng.random_range(w_lo..=w_hi)
            };
            g.connect(i, j, w);
        }
        Ok(g)
    }
}

/// Number of legal feedforward slots for `m` inputs, `h` existing hidden
/// neurons and `n` outputs.
pub fn legal_slot_count(m: usize, h: usize, n: usize) -> usize {
    m * h + m * n + h * h.saturating_sub(1) / 2 + h * n
}
