#![allow(dead_code)]

use neuroevo::data::Patterns;
use neuroevo::genome::{MatrixGenome, MatrixRanges};
use neuroevo::phenotype::{Loss, Network};
use rand::Rng;

pub fn random_matrix<R: Rng>(rng: &mut R, inputs: usize, max_hidden: usize, outputs: usize) -> MatrixGenome {
    let h_hi = max_hidden.saturating_sub(1).max(1).min(max_hidden);
    let ranges = MatrixRanges {
        inputs,
        outputs,
        max_hidden,
        hidden: (1.min(max_hidden), h_hi),
        connections: (1, 40),
        weights: (-2.0, 2.0),
    };
    MatrixGenome::random(&ranges, rng).expect("feasible ranges")
}

pub fn random_patterns<R: Rng>(rng: &mut R, inputs: usize, outputs: usize, count: usize) -> Patterns {
    Patterns {
        inputs: (0..count).map(|_| (0..inputs).map(|_| rng.random_range(-1.0..1.0)).collect()).collect(),
        targets: (0..count).map(|_| (0..outputs).map(|_| rng.random_range(0.0..1.0)).collect()).collect(),
    }
}

/// `|a - b|` relative to the larger magnitude, or absolute below `floor`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < floor {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

/// Fourth-order central difference of `f` at `x` along coordinate `k`.
pub fn central_difference<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], k: usize, h: f64) -> f64 {
    let at = |d: f64| {
        let mut y = x.to_vec();
        y[k] += d;
        f(&y)
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

pub fn finite_difference(net: &Network, patterns: &Patterns, loss: Loss, h: f64) -> Vec<f64> {
    let objective = |w: &[f64]| {
        let mut n = net.clone();
        n.weights = w.to_vec();
        n.loss(patterns.batch(), loss).unwrap()
    };
    (0..net.weights.len()).map(|k| central_difference(objective, &net.weights, k, h)).collect()
}

/// Local contrastive normalization written out with an explicit padded copy.
pub fn lcn_reference(grid: &[Vec<f64>], radius: usize) -> Vec<Vec<f64>> {
    let rows = grid.len();
    let cols = grid[0].len();
    let r = radius;
    let mut padded = vec![vec![0.0; cols + 2 * r]; rows + 2 * r];
    for i in 0..rows {
        for j in 0..cols {
            padded[i + r][j + r] = grid[i][j];
        }
    }
    let side = 2 * r + 1;
    let count = (side * side) as f64;
    let mut out = vec![vec![0.0; cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            let mut sum = 0.0;
            for a in 0..side {
                for b in 0..side {
                    sum += padded[i + a][j + b];
                }
            }
            let mean = sum / count;
            let mut sq = 0.0;
            for a in 0..side {
                for b in 0..side {
                    let d = padded[i + a][j + b] - mean;
                    sq += d * d;
                }
            }
            let std = (sq / count).sqrt();
            let centered = grid[i][j] - mean;
            out[i][j] = if std > 1.0 { centered / std } else { centered };
        }
    }
    out
}
