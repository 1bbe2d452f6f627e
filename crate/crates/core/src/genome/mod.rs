//! The three genome encodings and a tagged union over them.

pub mod bitstring;
pub mod genelist;
pub mod matrix;

use serde::{Deserialize, Serialize};

pub use bitstring::{fixed_length_of, header_width, BitStringGenome, Codebook, Layout, Substring};
pub use genelist::{ConnectionGene, GeneListGenome, NeuronGene, NeuronRole};
pub use matrix::{MatrixGenome, MatrixRanges, NeuronKind};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Genome {
    Bitstring(BitStringGenome),
    Matrix(MatrixGenome),
    Genelist(GeneListGenome),
}

impl Genome {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Genome::Bitstring(_) => "bitstring",
            Genome::Matrix(_) => "matrix",
            Genome::Genelist(_) => "genelist",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Genome::Bitstring(g) => g.validate(),
            Genome::Matrix(g) => g.validate(),
            Genome::Genelist(g) => g.validate(),
        }
    }

    pub fn input_count(&self) -> usize {
        match self {
            Genome::Bitstring(g) => g.inputs,
            Genome::Matrix(g) => g.inputs,
            Genome::Genelist(g) => g.input_count(),
        }
    }

    pub fn output_count(&self) -> usize {
        match self {
            Genome::Bitstring(g) => g.outputs,
            Genome::Matrix(g) => g.outputs,
            Genome::Genelist(g) => g.output_count(),
        }
    }

    pub fn hidden_count(&self) -> usize {
        match self {
            Genome::Bitstring(g) => g.hidden,
            Genome::Matrix(g) => g.hidden_count(),
            Genome::Genelist(g) => g.hidden_count(),
        }
    }

    /// Present (matrix, bit-string) or enabled (gene list) connections.
    pub fn connection_count(&self) -> usize {
        match self {
            Genome::Bitstring(g) => g.connection_count(),
            Genome::Matrix(g) => g.connection_count(),
            Genome::Genelist(g) => g.enabled_count(),
        }
    }
}

impl From<MatrixGenome> for Genome {
    fn from(g: MatrixGenome) -> Self {
        Genome::Matrix(g)
    }
}

impl From<GeneListGenome> for Genome {
    fn from(g: GeneListGenome) -> Self {
        Genome::Genelist(g)
    }
}

impl From<BitStringGenome> for Genome {
    fn from(g: BitStringGenome) -> Self {
        Genome::Bitstring(g)
    }
}
