use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Split};
use crate::error::{Error, Result};
use crate::rng::stream;

pub const MAX_PARITY_BITS: usize = 16;
pub const TRAIN_FRACTION: f64 = 0.8;

/// Column layout of a CSV dataset: inputs first, then targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvColumns {
    pub inputs: usize,
    pub outputs: usize,
    #[serde(default)]
    pub has_header: bool,
}

pub fn xor() -> Dataset {
    parity(2).expect("2 bits is within the guard")
}

/// All `2^n` bit patterns, target 1 when the count of ones is odd.
pub fn parity(n: usize) -> Result<Dataset> {
    if n == 0 || n > MAX_PARITY_BITS {
        return Err(Error::Data(format!("parity needs 1..={MAX_PARITY_BITS} bits, got {n}")));
    }
    let mut inputs = Vec::with_capacity(1 << n);
    let mut targets = Vec::with_capacity(1 << n);
    for p in 0..1usize << n {
        inputs.push((0..n).rev().map(|b| ((p >> b) & 1) as f64).collect());
        targets.push(vec![(p.count_ones() % 2) as f64]);
    }
    Dataset::new(inputs, targets)
}

/// Parses numeric CSV. Rows are reported 1-based as file lines, columns 1-based.
pub fn parse_csv<R: std::io::Read>(reader: R, columns: CsvColumns) -> Result<Dataset> {
    let width = columns.inputs + columns.outputs;
    if columns.inputs == 0 || columns.outputs == 0 {
        return Err(Error::Data("CSV needs at least one input and one output column".into()));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(columns.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse { row, column: 0, message: e.to_string() }
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width {
            return Err(Error::Parse {
                row,
                column: record.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        let mut values = Vec::with_capacity(width);
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                message: format!("not a number: {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { row, column: c + 1, message: format!("non-finite value {field:?}") });
            }
            values.push(v);
        }
        targets.push(values.split_off(columns.inputs));
        inputs.push(values);
    }
    Dataset::new(inputs, targets)
}

/// Seeded shuffle split; at least one pattern lands on each side.
pub fn split_dataset(mut data: Dataset, seed: u64) -> Result<Dataset> {
    let n = data.len();
    if n < 2 {
        return Err(Error::Data("a split needs at least 2 patterns".into()));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream(seed, "split", &[]));
    let train = ((n as f64 * TRAIN_FRACTION).round() as usize).clamp(1, n - 1);
    let validation = idx.split_off(train);
    data.split = Some(Split { train: idx, validation });
    data.validate()?;
    Ok(data)
}

/// Builtins (`xor`, `parity:N`) are exhaustive and unsplit; anything else is
/// read as a CSV path and split 80/20.
pub fn load_dataset(source: &str, columns: Option<CsvColumns>, seed: u64) -> Result<Dataset> {
    if source == "xor" {
        return Ok(xor());
    }
    if let Some(bits) = source.strip_prefix("parity:") {
        let n: usize = bits
            .parse()
            .map_err(|_| Error::Data(format!("bad parity size {bits:?}")))?;
        return parity(n);
    }
    let columns = columns.ok_or_else(|| {
        Error::Data(format!("dataset {source:?} is not a builtin; CSV column counts are required"))
    })?;
    let file = std::fs::File::open(Path::new(source))?;
    split_dataset(parse_csv(file, columns)?, seed)
}
