//! Cartesian hyperparameter grids.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::config::{ExperimentConfig, OptimizerConfig};
use crate::error::{CliError, CliResult};
use crate::harness::{execute, status};
use crate::output::{create_dir, grid_plot, write_run, GRID_SUMMARY_FILE, PLOT_FILE};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub rank: usize,
    pub cell: String,
    pub eta: f64,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub status: String,
    pub iterations: Option<usize>,
    pub final_loss: Option<f64>,
    pub min_loss: Option<f64>,
    pub min_grad_norm_sq: Option<f64>,
    pub best: bool,
}

/// Directory name of a cell, built from its parameters so it does not
/// depend on where the cell sits in the grid.
pub fn cell_name(opt: &OptimizerConfig) -> String {
    let mut name = format!("eta={:?}", opt.eta);
    if let Some(g) = opt.gamma {
        name.push_str(&format!("_gamma={g:?}"));
    }
    if let Some(d) = opt.delta {
        name.push_str(&format!("_delta={d:?}"));
    }
    name
}

fn run_cell(cfg: &ExperimentConfig, opt: OptimizerConfig, dir: &Path) -> CliResult<GridRow> {
    let name = cell_name(&opt);
    let base = GridRow {
        rank: 0,
        cell: name.clone(),
        eta: opt.eta,
        gamma: opt.gamma,
        delta: opt.delta,
        status: String::new(),
        iterations: None,
        final_loss: None,
        min_loss: None,
        min_grad_norm_sq: None,
        best: false,
    };
    match execute(&cfg.with_optimizer(opt)) {
        Ok(exec) => {
            let report = write_run(&dir.join(&name), &exec)?;
            Ok(GridRow {
                status: status(exec.trajectory.termination).to_string(),
                iterations: Some(report.iterations),
                final_loss: Some(report.final_loss),
                min_loss: Some(report.min_loss),
                min_grad_norm_sq: Some(report.min_grad_norm_sq),
                ..base
            })
        }
        // A cell whose start is already non-finite is recorded, not fatal.
        Err(CliError::Core(e)) => Ok(GridRow { status: format!("failed: {e}"), ..base }),
        Err(e) => Err(e),
    }
}

/// Runs every cell (up to `jobs` at a time), writes each cell's artifacts
/// under `dir/<cell name>/`, and writes `grid_summary.csv` ranked by final loss.
pub fn run_grid(cfg: &ExperimentConfig, dir: &Path, jobs: usize) -> CliResult<Vec<GridRow>> {
    // Surface problem-construction errors before grid-specific ones.
    crate::problem::build(cfg)?;
    if cfg.grid.is_none() {
        return Err(CliError::config("grid: the config has no grid axes"));
    }
    if cfg.noise.is_some_and(|n| n.epsilon.is_some()) {
        return Err(CliError::config("grid: noise.epsilon fixes eta and delta; remove it to sweep them"));
    }
    create_dir(dir)?;
    let cells = cfg.grid_cells();
    let results: Mutex<Vec<Option<CliResult<GridRow>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, cells.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&opt) = cells.get(i) else { break };
                let row = run_cell(cfg, opt, dir);
                results.lock().expect("no panics while holding the lock")[i] = Some(row);
            });
        }
    });
    let mut rows = results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect::<CliResult<Vec<_>>>()?;
    rank(&mut rows);
    write_summary(&dir.join(GRID_SUMMARY_FILE), &rows)?;
    let names: Vec<String> = rows.iter().filter(|r| r.iterations.is_some()).map(|r| r.cell.clone()).collect();
    std::fs::write(dir.join(PLOT_FILE), grid_plot(&names)).map_err(|e| CliError::io(&dir.join(PLOT_FILE), e))?;
    Ok(rows)
}

/// Finished cells first by final loss, then diverged cells, then failed ones;
/// ties broken by cell name.
fn rank(rows: &mut [GridRow]) {
    let class = |r: &GridRow| match r.status.as_str() {
        "diverged" => 1,
        s if s.starts_with("failed") => 2,
        _ => 0,
    };
    rows.sort_by(|a, b| {
        class(a)
            .cmp(&class(b))
            .then(a.final_loss.unwrap_or(f64::INFINITY).total_cmp(&b.final_loss.unwrap_or(f64::INFINITY)))
            .then_with(|| a.cell.cmp(&b.cell))
    });
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
        r.best = i == 0 && class(r) == 0;
    }
}

fn write_summary(path: &Path, rows: &[GridRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
