//! Experiment surface: datasets, run configuration, artifacts, inspection
//! and plotting.

mod config;
mod dataset;
mod inspect;
mod plot;
mod run;

pub use config::{Normalize, RunConfig, SCHEMA_VERSION};
pub use dataset::{load_dataset, parity, parse_csv, split_dataset, xor, CsvColumns, MAX_PARITY_BITS};
pub use inspect::{
    evaluate_genome, inspect, read_genome, ConnectionInfo, EvalReport, InspectReport, NeuronInfo,
};
pub use plot::{plot_metrics, read_metrics, render_svg, MetricsRow};
pub use run::{
    checkpoint_path, exit_code, metrics_row, prepare_dataset, read_checkpoint, run_evolve, RunSummary,
    BEST_GENOME_FILE, CHECKPOINT_DIR, CONFIG_SNAPSHOT_FILE, METRICS_FILE, METRICS_HEADER,
};
