//! Artifact writers: trace CSV, JSON reports and gnuplot scripts.

use std::fs;
use std::path::{Path, PathBuf};

use deltaclip_core::Trajectory;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::harness::{status, Analysis, Execution};

pub const TRACE_FILE: &str = "trace.csv";
pub const REPORT_FILE: &str = "report.json";
pub const CONFIG_FILE: &str = "config.json";
pub const PLOT_FILE: &str = "plot.gp";
pub const GRID_SUMMARY_FILE: &str = "grid_summary.csv";
pub const VERDICT_FILE: &str = "verdict.json";
pub const TRACE_HEADER: &str = "t,loss,grad_norm,step_size,dist_from_init";

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub status: &'static str,
    /// What the trace's `loss` column holds.
    pub loss_column: &'static str,
    pub iterations: usize,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub min_loss: f64,
    pub min_grad_norm_sq: f64,
    pub max_dist_from_init: f64,
    pub wall_time_s: f64,
    pub trace: String,
    pub config: ExperimentConfig,
    pub analysis: Analysis,
}

impl RunReport {
    pub fn new(exec: &Execution) -> Self {
        let t = &exec.trajectory;
        let neurotron = matches!(exec.setup.problem, crate::problem::Problem::Neurotron { .. });
        RunReport {
            status: status(t.termination),
            loss_column: if neurotron { "distance_to_teacher" } else { "loss" },
            iterations: t.iterations(),
            initial_loss: t.initial_loss(),
            final_loss: t.final_loss(),
            min_loss: t.min_loss(),
            min_grad_norm_sq: t.min_grad_norm_sq(),
            max_dist_from_init: t.max_dist_from_init(),
            wall_time_s: exec.wall_time.as_secs_f64(),
            trace: TRACE_FILE.to_string(),
            config: exec.config.clone(),
            analysis: exec.analysis.clone(),
        }
    }
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes one CSV row per recorded iterate under [`TRACE_HEADER`].
pub fn write_trace(path: &Path, traj: &Trajectory) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    for r in &traj.records {
        w.serialize(r).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Writes trace, report, config echo and plot script for one run into `dir`.
pub fn write_run(dir: &Path, exec: &Execution) -> CliResult<RunReport> {
    create_dir(dir)?;
    write_trace(&dir.join(TRACE_FILE), &exec.trajectory)?;
    write_json(&dir.join(CONFIG_FILE), &exec.config)?;
    let report = RunReport::new(exec);
    write_json(&dir.join(REPORT_FILE), &report)?;
    let plot = run_plot(report.loss_column);
    fs::write(dir.join(PLOT_FILE), plot).map_err(|e| CliError::io(&dir.join(PLOT_FILE), e))?;
    Ok(report)
}

fn run_plot(loss_label: &str) -> String {
    format!(
        "# gnuplot -p {PLOT_FILE}\n\
         set datafile separator ','\n\
         set key top right\n\
         set xlabel 't'\n\
         set multiplot layout 3,1\n\
         set logscale y\n\
         plot '{TRACE_FILE}' using 1:2 skip 1 with lines title '{loss_label}'\n\
         plot '{TRACE_FILE}' using 1:3 skip 1 with lines title 'grad norm'\n\
         unset logscale y\n\
         plot '{TRACE_FILE}' using 1:4 skip 1 with lines title 'step size'\n\
         unset multiplot\n"
    )
}

/// Plot script overlaying the loss column of every grid cell.
pub fn grid_plot(cells: &[String]) -> String {
    let names = cells.join(" ");
    format!(
        "# gnuplot -p {PLOT_FILE}\n\
         set datafile separator ','\n\
         set key outside right\n\
         set xlabel 't'\n\
         set ylabel 'loss'\n\
         set logscale y\n\
         cells = \"{names}\"\n\
         plot for [c in cells] c.'/{TRACE_FILE}' using 1:2 skip 1 with lines title c\n"
    )
}

/// Output directory precedence: `--out`, then `output_dir` in the config,
/// then `$DELTACLIP_OUT/<config name>`, then `deltaclip-out/<config name>`.
pub fn resolve_output_dir(
    explicit: Option<&Path>,
    cfg: &ExperimentConfig,
    config_path: &Path,
    env_root: Option<&Path>,
) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = &cfg.output_dir {
        return p.clone();
    }
    let stem = config_path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
    env_root.unwrap_or(Path::new("deltaclip-out")).join(stem)
}
