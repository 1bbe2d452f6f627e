//! In-memory supervised datasets with an optional train/validation split.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disjoint, covering train/validation index sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
    /// `None` means both training and validation use every pattern
    /// (exhaustive truth tables such as XOR).
    pub split: Option<Split>,
}

/// Borrowed view over a subset of patterns.
#[derive(Debug, Clone, Copy)]
pub struct Batch<'a> {
    pub inputs: &'a [Vec<f64>],
    pub targets: &'a [Vec<f64>],
}

impl<'a> Batch<'a> {
    pub fn new(inputs: &'a [Vec<f64>], targets: &'a [Vec<f64>]) -> Self {
        Self { inputs, targets }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a [f64], &'a [f64])> + 'a {
        let targets = self.targets;
        self.inputs
            .iter()
            .zip(targets.iter())
            .map(|(x, t)| (x.as_slice(), t.as_slice()))
    }
}

/// Owned subset of a dataset, materialized from split indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Patterns {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
}

impl Patterns {
    pub fn batch(&self) -> Batch<'_> {
        Batch::new(&self.inputs, &self.targets)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<Vec<f64>>) -> Result<Self> {
        let ds = Self {
            inputs,
            targets,
            split: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_width(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    pub fn target_width(&self) -> usize {
        self.targets.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Data("dataset has no patterns".into()));
        }
        if self.inputs.len() != self.targets.len() {
            return Err(Error::Data(format!(
                "{} input patterns but {} target patterns",
                self.inputs.len(),
                self.targets.len()
            )));
        }
        let (iw, tw) = (self.input_width(), self.target_width());
        if tw == 0 {
            return Err(Error::Data("targets have zero width".into()));
        }
        for (row, (x, t)) in self.inputs.iter().zip(&self.targets).enumerate() {
            if x.len() != iw || t.len() != tw {
                return Err(Error::Data(format!("pattern {row} has inconsistent width")));
            }
        }
        if let Some(split) = &self.split {
            let mut seen = vec![0u8; self.len()];
            for &i in split.train.iter().chain(&split.validation) {
                if i >= self.len() {
                    return Err(Error::Data(format!("split index {i} out of range")));
                }
                seen[i] += 1;
            }
            if seen.iter().any(|&c| c != 1) {
                return Err(Error::Data("split is not a disjoint cover".into()));
            }
            if split.train.is_empty() || split.validation.is_empty() {
                return Err(Error::Data("split leaves an empty side".into()));
            }
        }
        Ok(())
    }

    fn subset(&self, idx: &[usize]) -> Patterns {
        Patterns {
            inputs: idx.iter().map(|&i| self.inputs[i].clone()).collect(),
            targets: idx.iter().map(|&i| self.targets[i].clone()).collect(),
        }
    }

    pub fn train(&self) -> Patterns {
        match &self.split {
            Some(s) => self.subset(&s.train),
            None => self.all(),
        }
    }

    pub fn validation(&self) -> Patterns {
        match &self.split {
            Some(s) => self.subset(&s.validation),
            None => self.all(),
        }
    }

    pub fn all(&self) -> Patterns {
        Patterns {
            inputs: self.inputs.clone(),
            targets: self.targets.clone(),
        }
    }

    /// Copy with a constant 1.0 appended to every input pattern.
    pub fn with_bias_input(&self) -> Self {
        let mut out = self.clone();
        for x in &mut out.inputs {
            x.push(1.0);
        }
        out
    }
}
