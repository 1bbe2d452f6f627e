//! Error measures over target/actual vectors and success marking.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Sqe,
    Abs,
    Exp,
    Prechelt,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Sqe => "sqe",
            Measure::Abs => "abs",
            Measure::Exp => "exp",
            Measure::Prechelt => "prechelt",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "sqe" => Ok(Measure::Sqe),
            "abs" => Ok(Measure::Abs),
            "exp" => Ok(Measure::Exp),
            "prechelt" => Ok(Measure::Prechelt),
            other => Err(Error::Parameter(format!("unknown error measure {other:?}"))),
        }
    }
}

/// A measure plus the constants the percentage form needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessSpec {
    pub measure: Measure,
    pub o_max: f64,
    pub o_min: f64,
    /// Output neuron count.
    pub outputs: usize,
    /// Validation pattern count.
    pub patterns: usize,
}

impl FitnessSpec {
    pub fn new(measure: Measure, o_max: f64, o_min: f64, outputs: usize, patterns: usize) -> Result<Self> {
        let spec = Self { measure, o_max, o_min, outputs, patterns };
        spec.validate()?;
        Ok(spec)
    }

    /// Sum-style measure needing no range constants.
    pub fn simple(measure: Measure, outputs: usize, patterns: usize) -> Self {
        Self { measure, o_max: 1.0, o_min: 0.0, outputs, patterns }
    }

    pub fn validate(&self) -> Result<()> {
        if self.outputs == 0 || self.patterns == 0 {
            return Err(Error::Parameter("output and pattern counts must be at least 1".into()));
        }
        if self.measure == Measure::Prechelt && self.o_max <= self.o_min {
            return Err(Error::Parameter("o_max must exceed o_min".into()));
        }
        Ok(())
    }

    /// Error of flattened targets against flattened actual outputs.
    pub fn error(&self, targets: &[f64], actuals: &[f64]) -> Result<f64> {
        match self.measure {
            Measure::Sqe => error_sqe(targets, actuals),
            Measure::Abs => error_abs(targets, actuals),
            Measure::Exp => error_exp(targets, actuals),
            Measure::Prechelt => Ok(error_prechelt(self, error_sqe(targets, actuals)?)),
        }
    }
}

fn paired(targets: &[f64], actuals: &[f64]) -> Result<()> {
    check_len(targets.len(), actuals.len())?;
    if targets.is_empty() {
        return Err(Error::Dimension { expected: 1, actual: 0 });
    }
    Ok(())
}

pub fn error_sqe(targets: &[f64], actuals: &[f64]) -> Result<f64> {
    paired(targets, actuals)?;
    Ok(targets.iter().zip(actuals).map(|(t, a)| (t - a) * (t - a)).sum())
}

pub fn error_abs(targets: &[f64], actuals: &[f64]) -> Result<f64> {
    paired(targets, actuals)?;
    Ok(targets.iter().zip(actuals).map(|(t, a)| (t - a).abs()).sum())
}

pub fn error_exp(targets: &[f64], actuals: &[f64]) -> Result<f64> {
    paired(targets, actuals)?;
    Ok(targets.iter().zip(actuals).map(|(t, a)| (t - a).abs().exp()).sum())
}

/// `100 * (o_max - o_min) / n * e_sqe / T`, with the range as a factor.
pub fn error_prechelt(spec: &FitnessSpec, e_sqe: f64) -> f64 {
    100.0 * (spec.o_max - spec.o_min) / spec.outputs as f64 * e_sqe / spec.patterns as f64
}

/// Success iff the error strictly decreased.
pub fn mark(error_before: f64, error_after: f64) -> Result<bool> {
    if error_before.is_nan() || error_after.is_nan() {
        return Err(Error::Numeric("error value is NaN".into()));
    }
    Ok(error_after < error_before)
}

/// Fitness in `[0, 1]` with the maximum 1 reached only at zero error.
pub fn fitness_of_error(error: f64) -> f64 {
    1.0 / (1.0 + error.max(0.0))
}
