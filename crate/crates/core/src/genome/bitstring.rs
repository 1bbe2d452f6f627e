//! Variable-granularity bit-string encoding.
//!
//! A chromosome is a granularity header followed by one substring per
//! connection slot. Each substring is a connectivity bit plus `g - 1` weight
//! bits; when the connectivity bit is 0 the weight bits are dropped from the
//! logical string. For crossover every chromosome is also storable at a fixed
//! width of `H + slots * g_max` bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::matrix::MatrixGenome;

/// Offset-binary weight codebook: bits `b` decode to `w_lo + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codebook {
    pub w_lo: i64,
    pub bits: usize,
}

impl Codebook {
    pub fn w_hi(&self) -> i64 {
        self.w_lo + (1i64 << self.bits) - 1
    }

    pub fn len(&self) -> usize {
        1usize << self.bits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn decode(&self, bits: &[bool]) -> i64 {
        self.w_lo + bits_to_u64(bits) as i64
    }

    pub fn encode(&self, weight: f64) -> Result<Vec<bool>> {
        let err = || Error::Representation { weight, lo: self.w_lo, hi: self.w_hi() };
        if weight.fract() != 0.0 || !weight.is_finite() {
            return Err(err());
        }
        let w = weight as i64;
        if w < self.w_lo || w > self.w_hi() {
            return Err(err());
        }
        Ok(u64_to_bits((w - self.w_lo) as u64, self.bits))
    }
}

/// Ordered `(source, target)` neuron pairs giving each substring its meaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub slots: Vec<(usize, usize)>,
}

impl Layout {
    /// Every feedforward slot of a network with all hidden neurons present,
    /// grouped so that slots sharing a target are contiguous.
    pub fn feedforward(inputs: usize, hidden: usize, outputs: usize) -> Self {
        let mut shape = MatrixGenome::empty(inputs, hidden, outputs);
        shape.hidden_exists.iter_mut().for_each(|e| *e = 1);
        let mut slots = shape.legal_slots();
        slots.sort_by_key(|&(s, t)| (t, s));
        Self { slots }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substring {
    pub connected: bool,
    /// Always `g - 1` bits, kept even while disconnected so that a later
    /// connectivity flip has weight bits to expose.
    pub weight_bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BitStringRepr", into = "BitStringRepr")]
pub struct BitStringGenome {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
    pub g_max: usize,
    pub header: Vec<bool>,
    pub substrings: Vec<Substring>,
    pub layout: Layout,
    pub codebook: Codebook,
}

/// Header width: smallest bit count distinguishing every granularity up to `g_max`.
pub fn header_width(g_max: usize) -> usize {
    assert!(g_max >= 2, "g_max must be at least 2");
    let mut h = 0;
    while (1usize << h) < g_max {
        h += 1;
    }
    h
}

/// Width of the fixed-length storage used for crossover.
pub fn fixed_length_of(slots: usize, g_max: usize, header_bits: usize) -> usize {
    header_bits + slots * g_max
}

pub(crate) fn bits_to_u64(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
}

pub(crate) fn u64_to_bits(value: u64, width: usize) -> Vec<bool> {
    (0..width).rev().map(|k| (value >> k) & 1 == 1).collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(text: &str) -> Result<Vec<bool>> {
    text.chars()
        .enumerate()
        .map(|(i, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::StructuralDecode(format!(
                "character {other:?} at position {i} is not a bit"
            ))),
        })
        .collect()
}

/// Granularity named by a header, clamped into `[2, g_max]`.
pub fn granularity_from_header(header: &[bool], g_max: usize) -> usize {
    (bits_to_u64(header) as usize + 1).clamp(2, g_max)
}

impl BitStringGenome {
    /// All-disconnected genome at granularity `g`.
    pub fn empty(
        (inputs, hidden, outputs): (usize, usize, usize),
        layout: Layout,
        g: usize,
        g_max: usize,
        w_lo: i64,
    ) -> Result<Self> {
        if !(2..=g_max).contains(&g) {
            return Err(Error::Parameter(format!("granularity {g} outside 2..={g_max}")));
        }
        let genome = Self {
            inputs,
            hidden,
            outputs,
            g_max,
            header: u64_to_bits((g - 1) as u64, header_width(g_max)),
            substrings: layout
                .slots
                .iter()
                .map(|_| Substring { connected: false, weight_bits: vec![false; g - 1] })
                .collect(),
            layout,
            codebook: Codebook { w_lo, bits: g - 1 },
        };
        genome.validate()?;
        Ok(genome)
    }

    pub fn granularity(&self) -> usize {
        bits_to_u64(&self.header) as usize + 1
    }

    pub fn header_bits(&self) -> usize {
        self.header.len()
    }

    pub fn fixed_length(&self) -> usize {
        fixed_length_of(self.layout.len(), self.g_max, self.header_bits())
    }

    pub fn connection_count(&self) -> usize {
        self.substrings.iter().filter(|s| s.connected).count()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGenome(m));
        if self.g_max < 2 || self.header.len() != header_width(self.g_max) {
            return bad("header width does not match g_max".into());
        }
        let g = self.granularity();
        if g < 2 || g > self.g_max {
            return bad(format!("granularity {g} outside 2..={}", self.g_max));
        }
        if self.codebook.bits != g - 1 {
            return bad("codebook width differs from g - 1".into());
        }
        if self.substrings.len() != self.layout.len() {
            return bad("one substring per layout slot required".into());
        }
        if self.substrings.iter().any(|s| s.weight_bits.len() != g - 1) {
            return bad("every substring must carry g - 1 weight bits".into());
        }
        let dim = self.inputs + self.hidden + self.outputs;
        for &(s, t) in &self.layout.slots {
            if s >= t || t >= dim || t < self.inputs || s >= self.inputs + self.hidden {
                return bad(format!("layout slot ({s},{t}) is not a feedforward slot"));
            }
        }
        Ok(())
    }

    /// The variable-length chromosome: header, then per slot either `0` or
    /// `1` followed by the weight bits.
    pub fn logical_bits(&self) -> Vec<bool> {
        let mut out = self.header.clone();
        for s in &self.substrings {
            out.push(s.connected);
            if s.connected {
                out.extend_from_slice(&s.weight_bits);
            }
        }
        out
    }

    pub fn logical_len(&self) -> usize {
        self.header.len()
            + self
                .substrings
                .iter()
                .map(|s| if s.connected { self.granularity() } else { 1 })
                .sum::<usize>()
    }

    /// Parses a logical chromosome. Fails when the bits do not split exactly
    /// into a header and one substring per slot.
    pub fn from_logical_bits(
        bits: &[bool],
        shape: (usize, usize, usize),
        layout: Layout,
        g_max: usize,
        w_lo: i64,
    ) -> Result<Self> {
        let h = header_width(g_max);
        if bits.len() < h {
            return Err(Error::StructuralDecode(format!(
                "{} bits cannot hold a {h}-bit header",
                bits.len()
            )));
        }
        let g = bits_to_u64(&bits[..h]) as usize + 1;
        if g < 2 || g > g_max {
            return Err(Error::StructuralDecode(format!("header names granularity {g}")));
        }
        let mut pos = h;
        let mut substrings = Vec::with_capacity(layout.len());
        for k in 0..layout.len() {
            let Some(&connected) = bits.get(pos) else {
                return Err(Error::StructuralDecode(format!("string ends before slot {k}")));
            };
            pos += 1;
            let weight_bits = if connected {
                let end = pos + g - 1;
                if end > bits.len() {
                    return Err(Error::StructuralDecode(format!(
                        "slot {k} is missing weight bits"
                    )));
                }
                let w = bits[pos..end].to_vec();
                pos = end;
                w
            } else {
                vec![false; g - 1]
            };
            substrings.push(Substring { connected, weight_bits });
        }
        if pos != bits.len() {
            return Err(Error::StructuralDecode(format!(
                "{} trailing bits after the last slot",
                bits.len() - pos
            )));
        }
        let genome = Self {
            inputs: shape.0,
            hidden: shape.1,
            outputs: shape.2,
            g_max,
            header: bits[..h].to_vec(),
            substrings,
            layout,
            codebook: Codebook { w_lo, bits: g - 1 },
        };
        genome.validate().map_err(|e| Error::StructuralDecode(e.to_string()))?;
        Ok(genome)
    }

    /// Fixed-width storage: header, then for every slot a `g_max`-bit cell
    /// holding the connectivity bit, the `g - 1` weight bits, and zero padding.
    pub fn to_fixed(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.fixed_length());
        out.extend_from_slice(&self.header);
        for s in &self.substrings {
            out.push(s.connected);
            out.extend_from_slice(&s.weight_bits);
            out.extend(std::iter::repeat_n(false, self.g_max - 1 - s.weight_bits.len()));
        }
        out
    }

    /// Inverse of [`to_fixed`](Self::to_fixed) using `self` as the shape
    /// template. Out-of-range headers are clamped to a valid granularity.
    pub fn from_fixed(&self, bits: &[bool]) -> Result<Self> {
        if bits.len() != self.fixed_length() {
            return Err(Error::StructuralDecode(format!(
                "fixed storage must be {} bits, got {}",
                self.fixed_length(),
                bits.len()
            )));
        }
        let h = self.header_bits();
        let g = granularity_from_header(&bits[..h], self.g_max);
        let substrings = bits[h..]
            .chunks(self.g_max)
            .map(|cell| Substring { connected: cell[0], weight_bits: cell[1..g].to_vec() })
            .collect();
        let out = Self {
            header: u64_to_bits((g - 1) as u64, h),
            substrings,
            codebook: Codebook { w_lo: self.codebook.w_lo, bits: g - 1 },
            ..self.clone()
        };
        out.validate()?;
        Ok(out)
    }

    /// Decodes to the matrix form. Every hidden neuron of the fixed shape exists.
    pub fn decode(&self) -> Result<MatrixGenome> {
        self.validate()?;
        let mut m = MatrixGenome::empty(self.inputs, self.hidden, self.outputs);
        m.hidden_exists.iter_mut().for_each(|e| *e = 1);
        for (s, &(i, j)) in self.substrings.iter().zip(&self.layout.slots) {
            if s.connected {
                m.connect(i, j, self.codebook.decode(&s.weight_bits) as f64);
            }
        }
        Ok(m)
    }

    /// Encodes the layout slots of `matrix` at granularity `g`. Connections
    /// outside the layout are not represented.
    pub fn encode(
        matrix: &MatrixGenome,
        g: usize,
        g_max: usize,
        layout: Layout,
        w_lo: i64,
    ) -> Result<Self> {
        let mut out = Self::empty(
            (matrix.inputs, matrix.max_hidden, matrix.outputs),
            layout,
            g,
            g_max,
            w_lo,
        )?;
        for (k, &(i, j)) in out.layout.slots.iter().enumerate() {
            if matrix.is_connected(i, j) {
                out.substrings[k] = Substring {
                    connected: true,
                    weight_bits: out.codebook.encode(matrix.weight(i, j))?,
                };
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct BitStringRepr {
    inputs: usize,
    hidden: usize,
    outputs: usize,
    g_max: usize,
    w_lo: i64,
    layout: Vec<(usize, usize)>,
    /// Logical chromosome.
    bits: String,
    /// Fixed-width storage, including weight bits hidden behind a 0
    /// connectivity bit; preferred over `bits` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stored: Option<String>,
}

impl From<BitStringGenome> for BitStringRepr {
    fn from(g: BitStringGenome) -> Self {
        Self {
            inputs: g.inputs,
            hidden: g.hidden,
            outputs: g.outputs,
            g_max: g.g_max,
            w_lo: g.codebook.w_lo,
            bits: bits_to_string(&g.logical_bits()),
            stored: Some(bits_to_string(&g.to_fixed())),
            layout: g.layout.slots,
        }
    }
}

impl TryFrom<BitStringRepr> for BitStringGenome {
    type Error = Error;

    fn try_from(r: BitStringRepr) -> Result<Self> {
        let layout = Layout { slots: r.layout };
        let shape = (r.inputs, r.hidden, r.outputs);
        let logical =
            Self::from_logical_bits(&parse_bits(&r.bits)?, shape, layout, r.g_max, r.w_lo)?;
        match r.stored {
            Some(stored) => {
                let full = logical.from_fixed(&parse_bits(&stored)?)?;
                if full.logical_bits() != logical.logical_bits() {
                    return Err(Error::StructuralDecode(
                        "stored bits disagree with the logical chromosome".into(),
                    ));
                }
                Ok(full)
            }
            None => Ok(logical),
        }
    }
}
