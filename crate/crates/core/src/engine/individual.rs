use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::genome::Genome;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: u64,
    pub genome: Genome,
    pub error: f64,
    /// Set once a training attempt has been judged.
    pub success: Option<bool>,
    pub lineage: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
    pub hidden_mean: f64,
    pub conn_mean: f64,
    pub operators: BTreeMap<String, u64>,
}

impl GenerationReport {
    pub fn from_population(
        generation: usize,
        population: &[Individual],
        operators: BTreeMap<String, u64>,
    ) -> Self {
        let n = population.len() as f64;
        let best = population.iter().map(|i| i.error).fold(f64::INFINITY, f64::min);
        let worst = population.iter().map(|i| i.error).fold(f64::NEG_INFINITY, f64::max);
        let mean = (population.iter().map(|i| i.error).sum::<f64>() / n).clamp(best, worst);
        let hidden_mean = population.iter().map(|i| i.genome.hidden_count() as f64).sum::<f64>() / n;
        let conn_mean = population.iter().map(|i| i.genome.connection_count() as f64).sum::<f64>() / n;
        Self { generation, best, mean, worst, hidden_mean, conn_mean, operators }
    }
}

/// Index of the worst individual; among equal errors the last one.
fn worst_index(population: &[Individual]) -> usize {
    let mut idx = 0;
    for (k, ind) in population.iter().enumerate() {
        if ind.error >= population[idx].error {
            idx = k;
        }
    }
    idx
}

/// Worst replacement: each offspring, in order, takes the place of the
/// current worst individual if its error is strictly lower. Returns how many
/// offspring were admitted.
pub fn replace(population: &mut [Individual], offspring: Vec<Individual>) -> usize {
    let mut admitted = 0;
    if population.is_empty() {
        return 0;
    }
    for child in offspring {
        let w = worst_index(population);
        if child.error < population[w].error {
            population[w] = child;
            admitted += 1;
        }
    }
    admitted
}
