//! Structural mutations on the matrix encoding: importance-ranked connection
//! deletion and addition, uniform neuron deletion, and function-preserving
//! cell division.

use rand::seq::index::sample;
use rand::Rng;

use crate::data::Batch;
use crate::error::{Error, Result};
use crate::genome::MatrixGenome;
use crate::phenotype::{Activation, ConnKey, Loss, Network};

/// Importance assigned when every `xi` is identical (zero spread).
pub const TEST_SENTINEL: f64 = f64::MAX;

/// `sum(xi) / sqrt(sum((xi - mean)^2))` with `xi = w + delta_i`.
pub fn connection_test(weight: f64, deltas: &[f64]) -> Result<f64> {
    if deltas.len() < 2 {
        return Err(Error::Parameter(format!(
            "the test statistic needs at least 2 validation patterns, got {}",
            deltas.len()
        )));
    }
    let xi: Vec<f64> = deltas.iter().map(|d| weight + d).collect();
    let sum: f64 = xi.iter().sum();
    let mean = sum / xi.len() as f64;
    let spread: f64 = xi.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>().sqrt();
    if spread == 0.0 || xi.iter().all(|&x| x == xi[0]) {
        return Ok(TEST_SENTINEL);
    }
    Ok(sum / spread)
}

/// Test statistic for every link of `net`, with per-pattern
/// `delta_i = -eta * dE_abs/dw`.
pub fn connection_tests(net: &Network, batch: Batch<'_>, eta: f64) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::Data("connection importance needs validation patterns".into()));
    }
    let mut deltas = vec![Vec::with_capacity(batch.len()); net.links.len()];
    for (x, t) in batch.iter() {
        let g = net.pattern_gradient_with(&net.weights, x, t, Loss::Abs)?;
        for (d, gi) in deltas.iter_mut().zip(g) {
            d.push(-eta * gi);
        }
    }
    net.weights
        .iter()
        .zip(&deltas)
        .map(|(&w, d)| connection_test(w, d))
        .collect()
}

fn tests_by_slot(
    genome: &MatrixGenome,
    batch: Batch<'_>,
    eta: f64,
    activation: Activation,
) -> Result<Vec<((usize, usize), f64)>> {
    let net = Network::from_matrix(genome, activation)?;
    let tests = connection_tests(&net, batch, eta)?;
    Ok(net
        .keys
        .iter()
        .zip(tests)
        .map(|(k, t)| match *k {
            ConnKey::Matrix { from, to } => ((from, to), t),
            ConnKey::Gene(_) => unreachable!("matrix networks carry matrix keys"),
        })
        .collect())
}

/// Removes the `count` connections with the smallest `|test|`. Links that
/// were pruned from the phenotype have zero gradient and so get the sentinel.
pub fn delete_connections(
    genome: &MatrixGenome,
    count: usize,
    batch: Batch<'_>,
    eta: f64,
    activation: Activation,
) -> Result<MatrixGenome> {
    if count == 0 {
        return Ok(genome.clone());
    }
    let scored = tests_by_slot(genome, batch, eta, activation)?;
    let mut ranked: Vec<((usize, usize), f64)> = genome
        .connections()
        .into_iter()
        .map(|slot| {
            let t = scored
                .iter()
                .find(|(s, _)| *s == slot)
                .map_or(TEST_SENTINEL, |(_, t)| *t);
            (slot, t.abs())
        })
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut out = genome.clone();
    for &((i, j), _) in ranked.iter().take(count) {
        out.disconnect(i, j);
    }
    Ok(out)
}

/// Enables the `count` absent legal slots with the largest `|test|`,
/// measured at weight 0, and gives them weights drawn from `init`.
pub fn add_connections<R: Rng + ?Sized>(
    genome: &MatrixGenome,
    count: usize,
    batch: Batch<'_>,
    eta: f64,
    init: (f64, f64),
    activation: Activation,
    rng: &mut R,
) -> Result<MatrixGenome> {
    if count == 0 {
        return Ok(genome.clone());
    }
    let candidates = genome.absent_slots();
    if candidates.is_empty() {
        return Err(Error::ExhaustedSlots);
    }
    let mut probe = genome.clone();
    for &(i, j) in &candidates {
        probe.connect(i, j, 0.0);
    }
    let scored = tests_by_slot(&probe, batch, eta, activation)?;
    let mut ranked: Vec<((usize, usize), f64)> = scored
        .into_iter()
        .filter(|(s, _)| candidates.contains(s))
        .map(|(s, t)| (s, t.abs()))
        .collect();
    // descending, stable on slot order
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut out = genome.clone();
    for &((i, j), _) in ranked.iter().take(count) {
        let w = if init.0 == init.1 { init.0 } else { rng.random_range(init.0..=init.1) };
        out.connect(i, j, w);
    }
    Ok(out)
}

/// Deletes `count` hidden neurons chosen uniformly, with their links. A
/// count above the hidden total is clamped.
pub fn delete_neurons<R: Rng + ?Sized>(
    genome: &MatrixGenome,
    count: usize,
    rng: &mut R,
) -> MatrixGenome {
    let hidden = genome.existing_hidden();
    let count = if count > hidden.len() {
        log::debug!("clamping neuron deletion count {count} to {}", hidden.len());
        hidden.len()
    } else {
        count
    };
    let mut out = genome.clone();
    if count == 0 {
        return out;
    }
    let dim = out.dim();
    for k in sample(rng, hidden.len(), count).into_vec() {
        let v = hidden[k];
        for u in 0..dim {
            out.disconnect(u, v);
            out.disconnect(v, u);
        }
        out.hidden_exists[v - out.inputs] = 0;
    }
    out
}

/// Splits hidden neuron `neuron` in two. Both copies keep the incoming
/// weights; outgoing weight `w` becomes `(1 + alpha) w` on the original and
/// `-alpha w` on the copy, so every output is unchanged.
///
/// The copy goes into a free hidden slot between the neuron and its first
/// hidden successor; when no such slot is free the hidden neurons are
/// repacked in their existing order to make room.
pub fn cell_division(genome: &MatrixGenome, neuron: usize, alpha: f64) -> Result<MatrixGenome> {
    if genome.kind(neuron) != crate::genome::NeuronKind::Hidden || !genome.exists(neuron) {
        return Err(Error::InvalidTarget(format!("neuron {neuron} is not an existing hidden neuron")));
    }
    if genome.hidden_count() >= genome.max_hidden {
        return Err(Error::Capacity(genome.max_hidden));
    }
    let dim = genome.dim();
    let hidden_end = genome.inputs + genome.max_hidden;
    let first_hidden_target = (neuron + 1..hidden_end)
        .find(|&k| genome.is_connected(neuron, k))
        .unwrap_or(hidden_end);
    let free = (neuron + 1..first_hidden_target).find(|&k| !genome.exists(k));

    let (mut out, original, copy) = match free {
        Some(slot) => {
            let mut g = genome.clone();
            g.hidden_exists[slot - g.inputs] = 1;
            (g, neuron, slot)
        }
        None => {
            // existing hidden in index order, with a placeholder right after `neuron`
            let mut order: Vec<Option<usize>> = Vec::new();
            for h in genome.existing_hidden() {
                order.push(Some(h));
                if h == neuron {
                    order.push(None);
                }
            }
            let mut map: Vec<usize> = (0..dim).collect();
            let mut g = MatrixGenome::empty(genome.inputs, genome.max_hidden, genome.outputs);
            let mut copy = 0;
            for (k, slot) in order.iter().enumerate() {
                let idx = g.hidden_index(k);
                g.hidden_exists[k] = 1;
                match slot {
                    Some(h) => map[*h] = idx,
                    None => copy = idx,
                }
            }
            for (i, j) in genome.connections() {
                g.connect(map[i], map[j], genome.weight(i, j));
            }
            (g, map[neuron], copy)
        }
    };

    for u in 0..original {
        if out.is_connected(u, original) {
            let w = out.weight(u, original);
            out.connect(u, copy, w);
        }
    }
    for k in original + 1..dim {
        if k != copy && out.is_connected(original, k) {
            let w = out.weight(original, k);
            out.connect(original, k, (1.0 + alpha) * w);
            out.connect(copy, k, -alpha * w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_statistic_fixture() {
        let t = connection_test(1.0, &[0.1, -0.1]).unwrap();
        assert!((t - 2.0 / 0.02f64.sqrt()).abs() < 1e-12);
        assert_eq!(connection_test(0.3, &[0.2, 0.2, 0.2]).unwrap(), TEST_SENTINEL);
        assert!(connection_test(0.3, &[0.2]).is_err());
    }

    fn fixture() -> MatrixGenome {
        // input 0, hidden 1 (of 2 slots), output 3
        let mut g = MatrixGenome::empty(1, 2, 1);
        g.hidden_exists[0] = 1;
        g.connect(0, 1, 0.7);
        g.connect(1, 3, -0.3);
        g
    }

    #[test]
    fn cell_division_weights() {
        let g = fixture();
        let d = cell_division(&g, 1, 0.25).unwrap();
        assert_eq!(d.hidden_count(), 2);
        assert_eq!(d.weight(0, 1), 0.7);
        assert_eq!(d.weight(0, 2), 0.7);
        assert!((d.weight(1, 3) + 0.375).abs() < 1e-15);
        assert!((d.weight(2, 3) - 0.075).abs() < 1e-15);
        d.validate().unwrap();
    }

    #[test]
    fn cell_division_capacity_and_target() {
        let d = cell_division(&fixture(), 1, 0.25).unwrap();
        assert_eq!(cell_division(&d, 1, 0.25), Err(Error::Capacity(2)));
        assert!(matches!(cell_division(&fixture(), 0, 0.1), Err(Error::InvalidTarget(_))));
        assert!(matches!(cell_division(&fixture(), 2, 0.1), Err(Error::InvalidTarget(_))));
    }

    #[test]
    fn cell_division_repacks_when_blocked() {
        // hidden slots 0..3 at indices 1..4; neurons 1 and 2 exist, 1 -> 2 link
        let mut g = MatrixGenome::empty(1, 3, 1);
        g.hidden_exists[0] = 1;
        g.hidden_exists[1] = 1;
        g.connect(0, 1, 0.5);
        g.connect(1, 2, 1.5);
        g.connect(2, 4, -1.0);
        g.connect(1, 4, 0.25);
        let d = cell_division(&g, 1, 0.5).unwrap();
        d.validate().unwrap();
        assert_eq!(d.hidden_count(), 3);
        // original stays at 1, copy at 2, old neuron 2 moves to 3
        assert_eq!(d.weight(0, 2), 0.5);
        assert_eq!(d.weight(1, 3), 2.25);
        assert_eq!(d.weight(2, 3), -0.75);
        assert_eq!(d.weight(3, 4), -1.0);
    }

    #[test]
    fn delete_neuron_removes_links() {
        let g = fixture();
        let d = delete_neurons(&g, 1, &mut crate::rng::seeded(0));
        assert_eq!(d.hidden_count(), 0);
        assert_eq!(d.connection_count(), 0);
        d.validate().unwrap();
        assert_eq!(delete_neurons(&g, 0, &mut crate::rng::seeded(0)), g);
        assert_eq!(delete_neurons(&g, 7, &mut crate::rng::seeded(0)).hidden_count(), 0);
    }
}
