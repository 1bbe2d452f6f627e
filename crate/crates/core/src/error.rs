use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("structural decode error: {0}")]
    StructuralDecode(String),
    #[error("weight {weight} is not representable (codebook {lo}..={hi})")]
    Representation { weight: f64, lo: i64, hi: i64 },
    #[error("infeasible ranges: {0}")]
    InfeasibleRange(String),
    #[error("genome contains a cycle among enabled connections")]
    CyclicGenome,
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("population is empty")]
    EmptyPopulation,
    #[error("population too small: need at least {needed}, have {actual}")]
    PopulationTooSmall { needed: usize, actual: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no legal slot left for the mutation")]
    ExhaustedSlots,
    #[error("hidden neuron capacity reached ({0})")]
    Capacity(usize),
    #[error("invalid mutation target: {0}")]
    InvalidTarget(String),
    #[error("parents are incompatible: {0}")]
    IncompatibleParents(String),
    #[error("batch size {0} is too small for training-mode batch normalization")]
    BatchSize(usize),
    #[error("cache does not match the gradient: {0}")]
    Cache(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid genome: {0}")]
    InvalidGenome(String),
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(format!("json: {e}"))
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}
