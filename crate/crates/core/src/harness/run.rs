use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::data::Dataset;
use crate::dlopt::whiten;
use crate::engine::{Checkpoint, Evolution, GenerationReport, StopReason};
use crate::error::{Error, Result};

use super::config::{resolve, Normalize, RunConfig};
use super::dataset::load_dataset;

pub const METRICS_HEADER: &str = "gen,best,mean,worst,hidden_mean,conn_mean";
pub const METRICS_FILE: &str = "metrics.csv";
pub const BEST_GENOME_FILE: &str = "best_genome.json";
pub const CONFIG_SNAPSHOT_FILE: &str = "config.json";
pub const CHECKPOINT_DIR: &str = "checkpoints";

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub reason: StopReason,
    pub generations: usize,
    pub best_error: f64,
    pub output_dir: PathBuf,
}

/// Process exit status for a finished run.
pub fn exit_code(reason: StopReason) -> i32 {
    match reason {
        StopReason::TargetReached => 0,
        StopReason::Stagnation | StopReason::MaxGenerations => 2,
    }
}

pub fn metrics_row(r: &GenerationReport) -> String {
    format!("{},{},{},{},{},{}", r.generation, r.best, r.mean, r.worst, r.hidden_mean, r.conn_mean)
}

pub fn checkpoint_path(dir: &Path, generation: usize) -> PathBuf {
    dir.join(CHECKPOINT_DIR).join(format!("gen_{generation:06}.json"))
}

/// Loads the dataset a config names and applies its normalization.
pub fn prepare_dataset(cfg: &RunConfig, base: &Path) -> Result<Dataset> {
    let source = match cfg.dataset.as_str() {
        s if s == "xor" || s.starts_with("parity:") => s.to_string(),
        s => resolve(base, Path::new(s)).to_string_lossy().into_owned(),
    };
    let mut data = load_dataset(&source, cfg.columns, cfg.evolution.seed)?;
    if cfg.normalize == Normalize::Whiten {
        let (_, w) = whiten(&data.train().inputs)?;
        data.inputs = w.apply(&data.inputs)?;
    }
    Ok(data)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Runs (or resumes) the experiment described by `config_path`, writing the
/// config snapshot, metrics, periodic checkpoints and the best genome.
pub fn run_evolve(config_path: &Path, resume: Option<&Path>) -> Result<RunSummary> {
    let cfg = RunConfig::load(config_path)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let out_dir = resolve(base, &cfg.output_dir);
    fs::create_dir_all(out_dir.join(CHECKPOINT_DIR))?;
    let data = prepare_dataset(&cfg, base)?;

    let mut evo = match resume {
        Some(p) => {
            let ckpt = read_checkpoint(p)?;
            if ckpt.config != cfg.evolution {
                return Err(Error::Config(vec!["checkpoint was written under a different evolution config".into()]));
            }
            log::info!("resuming from generation {}", ckpt.generation);
            Evolution::resume(ckpt, &data)?
        }
        None => Evolution::new(cfg.evolution.clone(), &data)?,
    };
    fs::write(out_dir.join(CONFIG_SNAPSHOT_FILE), cfg.to_json()?)?;

    let mut metrics = fs::File::create(out_dir.join(METRICS_FILE))?;
    writeln!(metrics, "{METRICS_HEADER}")?;
    for r in evo.history() {
        writeln!(metrics, "{}", metrics_row(r))?;
    }
    let reason = loop {
        if let Some(reason) = evo.stop_reason() {
            break reason;
        }
        let row = metrics_row(evo.step()?);
        writeln!(metrics, "{row}")?;
        if evo.generation() % cfg.checkpoint_every == 0 {
            metrics.flush()?;
            write_json(&checkpoint_path(&out_dir, evo.generation()), &evo.checkpoint())?;
        }
    };
    metrics.flush()?;
    write_json(&checkpoint_path(&out_dir, evo.generation()), &evo.checkpoint())?;
    let best = evo.best();
    write_json(&out_dir.join(BEST_GENOME_FILE), &best.genome)?;
    log::info!("stopped at generation {} ({reason:?}), best error {}", evo.generation(), best.error);
    Ok(RunSummary { reason, generations: evo.generation(), best_error: best.error, output_dir: out_dir })
}
