use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::EvolutionConfig;
use crate::error::{Error, Result};

use super::dataset::CsvColumns;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalize {
    #[default]
    None,
    /// Zero mean, unit variance per input, with statistics from the
    /// training patterns.
    Whiten,
}

fn default_checkpoint_every() -> usize {
    50
}

/// On-disk experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// `xor`, `parity:N`, or a CSV path (relative paths resolve against the
    /// config file's directory).
    pub dataset: String,
    #[serde(default)]
    pub columns: Option<CsvColumns>,
    #[serde(default)]
    pub normalize: Normalize,
    /// Output directory, relative to the config file.
    pub output_dir: PathBuf,
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: usize,
    pub evolution: EvolutionConfig,
}

impl RunConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            v.push(format!("schema_version must be {SCHEMA_VERSION}"));
        }
        if self.dataset.trim().is_empty() {
            v.push("dataset must not be empty".into());
        }
        if self.checkpoint_every == 0 {
            v.push("checkpoint_every must be ≥ 1".into());
        }
        v.extend(self.evolution.violations());
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Resolves `p` against `base` unless it is absolute.
pub(crate) fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
