//! Parent selection: rank-proportional sampling, fittest-half truncation and
//! uniform random pairing.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionStrategy {
    #[serde(rename = "rank")]
    Rank,
    #[serde(rename = "fittest-half")]
    FittestHalf,
    #[serde(rename = "random-pair")]
    RandomPair,
}

impl SelectionStrategy {
    pub fn name(self) -> &'static str {
        match self {
            SelectionStrategy::Rank => "rank",
            SelectionStrategy::FittestHalf => "fittest-half",
            SelectionStrategy::RandomPair => "random-pair",
        }
    }
}

/// Population indices ordered by ascending error; position = rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPopulation {
    order: Vec<usize>,
    errors: Vec<f64>,
}

impl RankedPopulation {
    /// Stable sort, so equal errors keep their insertion order.
    pub fn new(errors: &[f64]) -> Result<Self> {
        if errors.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        if errors.iter().any(|e| e.is_nan()) {
            return Err(Error::Numeric("cannot rank a NaN error".into()));
        }
        let mut order: Vec<usize> = (0..errors.len()).collect();
        order.sort_by(|&a, &b| errors[a].total_cmp(&errors[b]));
        let errors = order.iter().map(|&i| errors[i]).collect();
        Ok(Self { order, errors })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Original population index of the individual at `rank`.
    pub fn index_at(&self, rank: usize) -> usize {
        self.order[rank]
    }

    pub fn error_at(&self, rank: usize) -> f64 {
        self.errors[rank]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// `P(rank) = (M - rank) / (1 + 2 + ... + M)` for ranks `0..M`.
pub fn rank_probabilities(m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::EmptyPopulation);
    }
    let total = (m as f64) * (m as f64 + 1.0) / 2.0;
    Ok((0..m).map(|rank| (m - rank) as f64 / total).collect())
}

/// Draws a population index with rank-based probability.
pub fn sample_parent<R: Rng + ?Sized>(pop: &RankedPopulation, rng: &mut R) -> usize {
    if pop.len() == 1 {
        return pop.index_at(0);
    }
    // integer weights M..1 keep the draw exact
    let m = pop.len();
    let dist = WeightedIndex::new((0..m).map(|rank| (m - rank) as u64)).expect("positive weights");
    pop.index_at(dist.sample(rng))
}

/// The `ceil(M/2)` lowest-error individuals, best first.
pub fn fittest_half(pop: &RankedPopulation) -> Result<Vec<usize>> {
    if pop.len() < 2 {
        return Err(Error::PopulationTooSmall { needed: 2, actual: pop.len() });
    }
    Ok(pop.order()[..pop.len().div_ceil(2)].to_vec())
}

/// Uniformly random perfect matching of `0..m`. An odd population gets one
/// uniformly chosen member duplicated first.
pub fn random_pairing<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if m == 0 {
        return Err(Error::EmptyPopulation);
    }
    let mut pool: Vec<usize> = (0..m).collect();
    if m % 2 == 1 {
        pool.push(rng.random_range(0..m));
    }
    pool.shuffle(rng);
    Ok(pool.chunks(2).map(|c| (c[0], c[1])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn probabilities_for_four() {
        let p = rank_probabilities(4).unwrap();
        let expect = [0.4, 0.3, 0.2, 0.1];
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(rank_probabilities(1).unwrap(), vec![1.0]);
        assert_eq!(rank_probabilities(0), Err(Error::EmptyPopulation));
    }

    #[test]
    fn single_individual_always_chosen() {
        let pop = RankedPopulation::new(&[3.0]).unwrap();
        let mut rng = seeded(5);
        assert!((0..100).all(|_| sample_parent(&pop, &mut rng) == 0));
    }

    #[test]
    fn sampling_is_reproducible() {
        let pop = RankedPopulation::new(&[0.3, 0.1, 0.2, 0.9]).unwrap();
        let a: Vec<usize> = { let mut r = seeded(7); (0..50).map(|_| sample_parent(&pop, &mut r)).collect() };
        let b: Vec<usize> = { let mut r = seeded(7); (0..50).map(|_| sample_parent(&pop, &mut r)).collect() };
        assert_eq!(a, b);
    }

    #[test]
    fn fittest_half_cases() {
        let pop = RankedPopulation::new(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(fittest_half(&pop).unwrap(), vec![0, 1]);
        let pop = RankedPopulation::new(&[0.5, 0.1, 0.4, 0.2, 0.3]).unwrap();
        assert_eq!(fittest_half(&pop).unwrap(), vec![1, 3, 4]);
        let pop = RankedPopulation::new(&[1.0; 6]).unwrap();
        assert_eq!(fittest_half(&pop).unwrap(), vec![0, 1, 2]);
        let pop = RankedPopulation::new(&[1.0]).unwrap();
        assert!(matches!(fittest_half(&pop), Err(Error::PopulationTooSmall { .. })));
    }

    #[test]
    fn pairing_shapes() {
        let mut rng = seeded(3);
        let pairs = random_pairing(2, &mut rng).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].0 + pairs[0].1, 1);
        let pairs = random_pairing(3, &mut rng).unwrap();
        assert_eq!(pairs.len(), 2);
        let mut members: Vec<usize> = pairs.iter().flat_map(|p| [p.0, p.1]).collect();
        members.sort();
        members.dedup();
        assert_eq!(members, vec![0, 1, 2]);
    }
}
