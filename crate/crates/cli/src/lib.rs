//! Experiment runner for regularized gradient clipping.
//!
//! Three commands share one config format (see [`config`]):
//! `run` executes a single seeded run, `grid` sweeps the Cartesian product of
//! the configured η/γ/δ axes, and `verify` checks the run against the theory.

pub mod config;
pub mod error;
pub mod grid;
pub mod harness;
pub mod output;
pub mod problem;
pub mod verify;

use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use grid::GridRow;
pub use output::RunReport;
pub use verify::{CheckStatus, Verdict};

/// Environment variable holding the default output root.
pub const OUT_ENV: &str = "DELTACLIP_OUT";

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub seed: Option<u64>,
    pub env_out: Option<PathBuf>,
}

pub fn load(path: &Path, opts: &Options) -> CliResult<(ExperimentConfig, PathBuf)> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    let dir = output::resolve_output_dir(opts.out.as_deref(), &cfg, path, opts.env_out.as_deref());
    Ok((cfg, dir))
}

pub fn cmd_run(path: &Path, opts: &Options) -> CliResult<(PathBuf, RunReport)> {
    let (cfg, dir) = load(path, opts)?;
    let exec = harness::execute(&cfg)?;
    let report = output::write_run(&dir, &exec)?;
    Ok((dir, report))
}

pub fn cmd_grid(path: &Path, opts: &Options) -> CliResult<(PathBuf, Vec<GridRow>)> {
    let (cfg, dir) = load(path, opts)?;
    let rows = grid::run_grid(&cfg, &dir, opts.jobs.max(1))?;
    Ok((dir, rows))
}

pub fn cmd_verify(path: &Path, opts: &Options) -> CliResult<(PathBuf, Verdict)> {
    let (cfg, dir) = load(path, opts)?;
    let (exec, verdict) = verify::verify(&cfg)?;
    output::write_run(&dir, &exec)?;
    output::write_json(&dir.join(output::VERDICT_FILE), &verdict)?;
    Ok((dir, verdict))
}
