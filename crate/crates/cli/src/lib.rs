//! Experiment runner for box systems: reads a JSON config, runs the
//! requested verification tasks and writes `report.json` and `kernels.csv`.

pub mod config;
pub mod report;
pub mod tasks;

use std::path::Path;

use cfsgauge_core::DiracBox;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{ConfigError, ExperimentConfig, Task};
pub use report::{Entry, Observation, Relation, Report, TaskFailure};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub parallel: bool,
    /// Overrides the seed of the config.
    pub seed: Option<u64>,
}

/// Runs every task of `cfg` in order. Task failures are recorded and the
/// remaining tasks still run.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(Report, tasks::Context), ConfigError> {
    let seed = opts.seed.unwrap_or(cfg.seed);
    let dbox = DiracBox::new(cfg.box_config()).map_err(|e| ConfigError { field: "box".into(), message: e.to_string() })?;
    let mut ctx = tasks::Context {
        dbox,
        points: cfg.sample_points(),
        tol: cfg.tolerances,
        rng: ChaCha8Rng::seed_from_u64(seed),
        parallel: opts.parallel,
    };
    let mut report = Report { seed, mode_count: ctx.dbox.f(), ..Report::default() };
    for &task in &cfg.tasks {
        let result = match task {
            Task::DimCount => tasks::dim_count(&mut ctx),
            Task::Charts => tasks::charts(&mut ctx),
            Task::Gauge => tasks::gauge(&mut ctx),
            Task::Spectral => tasks::spectral(&mut ctx),
            Task::Perturb => tasks::perturb(&mut ctx),
        };
        match result {
            Ok(out) => {
                report.entries.extend(out.entries);
                report.observations.extend(out.observations);
            }
            Err(message) => report.task_errors.push(TaskFailure { task: task.name(), message }),
        }
    }
    Ok((report, ctx))
}

pub fn write_kernels_csv(ctx: &tasks::Context, path: &Path) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "x1", "x2", "x3", "row", "col", "re", "im"])?;
    for (x, p) in tasks::kernel_rows(ctx) {
        for row in 0..4 {
            for col in 0..4 {
                let z = p[(row, col)];
                w.write_record([
                    x.t.to_string(),
                    x.x[0].to_string(),
                    x.x[1].to_string(),
                    x.x[2].to_string(),
                    row.to_string(),
                    col.to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `run` plus the two output files in `out_dir`.
pub fn run_to_dir(cfg: &ExperimentConfig, opts: &RunOptions, out_dir: &Path) -> Result<Report, RunError> {
    let (report, ctx) = run(cfg, opts)?;
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("report.json"), report.to_json())?;
    write_kernels_csv(&ctx, &out_dir.join("kernels.csv"))?;
    Ok(report)
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing kernels.csv: {0}")]
    Csv(#[from] csv::Error),
}
