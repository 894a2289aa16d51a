use std::path::PathBuf;
use std::process::ExitCode;

use cfsgauge_cli::{run_to_dir, ExperimentConfig, RunError, RunOptions};
use cfsgauge_core::manifold::manifold_dim;
use cfsgauge_core::{DiracBox, DiracBoxConfig};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "cfsgauge", version, about = "Gauge fixing and chart checks for box causal fermion systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the tasks of a JSON experiment config
    Run {
        config: PathBuf,
        /// Directory for report.json and kernels.csv
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Evaluate points in parallel inside tasks
        #[arg(long)]
        parallel: bool,
        /// Override the seed from the config
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the dimension 2(p+q)f − (p+q)² of the operator manifold
    Dim { p: usize, q: usize, f: usize },
    /// Print the number of modes f of a box
    Modes {
        #[arg(value_name = "L")]
        l: f64,
        eps: f64,
        m: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, parallel, seed } => {
            let cfg = match ExperimentConfig::load(&config) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            match run_to_dir(&cfg, &RunOptions { parallel, seed }, &out) {
                Ok(report) => {
                    let failed = report.entries.iter().filter(|e| !e.pass).count();
                    for e in report.entries.iter().filter(|e| !e.pass) {
                        eprintln!("FAIL {}: {:e} (threshold {:e})", e.name, e.measured, e.threshold);
                    }
                    for t in &report.task_errors {
                        eprintln!("task {} failed: {}", t.task, t.message);
                    }
                    println!(
                        "{} entries, {} failed, {} task errors; wrote {}",
                        report.entries.len(),
                        failed,
                        report.task_errors.len(),
                        out.display()
                    );
                    if report.all_pass() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(RunError::Config(e)) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Dim { p, q, f } => match manifold_dim(p, q, f) {
            Ok(d) => {
                println!("{d}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(2)
            }
        },
        Command::Modes { l, eps, m } => match DiracBoxConfig::new(l, eps, m).and_then(DiracBox::new) {
            Ok(b) => {
                println!("{}", b.f());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(2)
            }
        },
    }
}
