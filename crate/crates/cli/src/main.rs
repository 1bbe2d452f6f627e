use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use neuroevo::harness::{self, CsvColumns};
use neuroevo::{Error, Measure};

/// Evolve, evaluate and inspect feedforward network genomes.
#[derive(Parser)]
#[command(name = "neuroevo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Continue from a checkpoint written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Evaluate a saved genome on a dataset.
    Eval {
        #[arg(long)]
        genome: PathBuf,
        /// `xor`, `parity:N`, or a CSV path.
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value = "sqe")]
        measure: String,
        /// Input columns of a CSV dataset.
        #[arg(long)]
        inputs: Option<usize>,
        /// Target columns of a CSV dataset.
        #[arg(long)]
        outputs: Option<usize>,
        /// The CSV file starts with a header row.
        #[arg(long)]
        header: bool,
    },
    /// Describe a saved genome and print it as a DOT graph.
    Inspect {
        #[arg(long)]
        genome: PathBuf,
        /// Write the DOT graph here instead of stdout.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Render a metrics CSV as an SVG line chart.
    PlotMetrics {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Evolve { config, resume } => {
            let summary = harness::run_evolve(&config, resume.as_deref())?;
            println!(
                "{:?} after {} generations, best error {}",
                summary.reason, summary.generations, summary.best_error
            );
            println!("artifacts in {}", summary.output_dir.display());
            Ok(harness::exit_code(summary.reason) as u8)
        }
        Command::Eval { genome, dataset, measure, inputs, outputs, header } => {
            let g = harness::read_genome(&genome)?;
            let columns = match (inputs, outputs) {
                (Some(inputs), Some(outputs)) => Some(CsvColumns { inputs, outputs, has_header: header }),
                (None, None) => None,
                _ => anyhow::bail!("--inputs and --outputs go together"),
            };
            let data = harness::load_dataset(&dataset, columns, 0)?;
            let report = harness::evaluate_genome(&g, &data, Measure::parse(&measure)?)?;
            for (x, y) in data.inputs.iter().zip(&report.outputs) {
                println!("{x:?} -> {y:?}");
            }
            println!("error ({measure}): {}", report.error);
            Ok(0)
        }
        Command::Inspect { genome, dot } => {
            let report = harness::inspect(&genome)?;
            print!("{}", report.text());
            match dot {
                Some(path) => std::fs::write(&path, report.dot())
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{}", report.dot()),
            }
            Ok(0)
        }
        Command::PlotMetrics { input, out } => {
            harness::plot_metrics(&input, &out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NEUROEVO_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            match e.downcast_ref::<Error>() {
                Some(Error::Config(violations)) => {
                    eprintln!("invalid config:");
                    for v in violations {
                        eprintln!("  {v}");
                    }
                }
                _ => eprintln!("error: {e:#}"),
            }
            ExitCode::from(1)
        }
    }
}
