use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::bitstring::{granularity_from_header, u64_to_bits};
use crate::genome::{BitStringGenome, Codebook};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BitMutationRates {
    pub p_granularity: f64,
    pub p_connectivity: f64,
    pub p_weight: f64,
}

impl BitMutationRates {
    pub fn validate(&self) -> Result<()> {
        for p in [self.p_granularity, self.p_connectivity, self.p_weight] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("mutation probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Independent bit flips on the header, connectivity and weight bits. The
/// granularity is then re-read (clamped into range) and every weight
/// substring resized: truncated at the most significant end when it
/// shrinks, zero-extended there when it grows.
pub fn mutate_bitstring<R: Rng + ?Sized>(
    genome: &BitStringGenome,
    rates: &BitMutationRates,
    rng: &mut R,
) -> Result<BitStringGenome> {
    rates.validate()?;
    let mut out = genome.clone();
    for b in &mut out.header {
        if rng.random_bool(rates.p_granularity) {
            *b = !*b;
        }
    }
    for s in &mut out.substrings {
        if rng.random_bool(rates.p_connectivity) {
            s.connected = !s.connected;
        }
        for b in &mut s.weight_bits {
            if rng.random_bool(rates.p_weight) {
                *b = !*b;
            }
        }
    }
    let g = granularity_from_header(&out.header, out.g_max);
    out.header = u64_to_bits((g - 1) as u64, out.header.len());
    let width = g - 1;
    for s in &mut out.substrings {
        let len = s.weight_bits.len();
        if len > width {
            s.weight_bits.drain(..len - width);
        } else if len < width {
            let mut grown = vec![false; width - len];
            grown.extend_from_slice(&s.weight_bits);
            s.weight_bits = grown;
        }
    }
    out.codebook = Codebook { w_lo: out.codebook.w_lo, bits: width };
    out.validate()?;
    Ok(out)
}

/// Crossover at explicit cut positions (a cut at `k` splits before bit `k`).
pub fn npoint_crossover_at(a: &[bool], b: &[bool], cuts: &[usize]) -> Result<(Vec<bool>, Vec<bool>)> {
    if a.len() != b.len() {
        return Err(Error::IncompatibleParents(format!(
            "fixed lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut c1 = Vec::with_capacity(a.len());
    let mut c2 = Vec::with_capacity(a.len());
    let mut swapped = false;
    let mut next = cuts.iter().peekable();
    for k in 0..a.len() {
        while next.peek().is_some_and(|&&c| c == k) {
            swapped = !swapped;
            next.next();
        }
        if swapped {
            c1.push(b[k]);
            c2.push(a[k]);
        } else {
            c1.push(a[k]);
            c2.push(b[k]);
        }
    }
    Ok((c1, c2))
}

/// `n` distinct cut points drawn uniformly from the `len - 1` interior
/// positions; segments alternate between the parents.
pub fn npoint_crossover<R: Rng + ?Sized>(
    a: &[bool],
    b: &[bool],
    n: usize,
    rng: &mut R,
) -> Result<(Vec<bool>, Vec<bool>)> {
    if a.len() != b.len() {
        return Err(Error::IncompatibleParents(format!(
            "fixed lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if n == 0 || n >= a.len() {
        return Err(Error::Parameter(format!(
            "need 1 <= n < {} crossover points, got {n}",
            a.len()
        )));
    }
    let mut cuts: Vec<usize> = sample(rng, a.len() - 1, n).into_iter().map(|k| k + 1).collect();
    cuts.sort_unstable();
    npoint_crossover_at(a, b, &cuts)
}
