//! Experiment configuration, version 1.
//!
//! A config is one JSON document:
//!
//! ```json
//! {
//!   "version": 1,
//!   "seed": 0,
//!   "iterations": 500,
//!   "objective": { "kind": "quadratic", "diag": [1.0, 10.0] },
//!   "optimizer": { "kind": "delta-gclip", "eta": 0.09, "gamma": 1.0, "delta": 0.5 },
//!   "init": { "kind": "gaussian", "scale": 5.0 }
//! }
//! ```
//!
//! Optional keys: `stop_tol`, `schedule` (list of `[iteration, divisor]`),
//! `noise` (`theta`, and `epsilon` to take η, δ and T from the stochastic
//! recipe), `output_dir`, and `grid` (lists for `eta`, `gamma`, `delta`).
//!
//! Objective kinds:
//! - `quadratic`: `diag` or `matrix` (symmetric positive definite), loss `½wᵀAw`.
//! - `mlp`: `widths` (last entry 1), `hidden` and `output` activations
//!   (`identity`, `tanh`, `relu`), and a `dataset`, either
//!   `{"kind": "random_unit", "samples": n, "target_low": a, "target_high": b}`
//!   or `{"kind": "csv", "path": "data.csv"}`. CSV files hold one sample per
//!   row, features then target, with an optional header row. Paths are
//!   resolved against the config file's directory.
//! - `neurotron`: `filter_dim`, `input_dim`, `gates`, `matrices`
//!   (`identity` or `gaussian`), `beta_flip`, `noise_magnitude`, `batch`.
//!   Uses the `constant` optimizer kind; η is the Tron step.

use std::fmt;
use std::path::{Path, PathBuf};

use deltaclip_core::objectives::Activation;
use deltaclip_core::{Schedule, StepRule, StepRuleKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub seed: u64,
    pub iterations: usize,
    #[serde(default = "default_stop_tol")]
    pub stop_tol: f64,
    pub objective: ObjectiveConfig,
    pub optimizer: OptimizerConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<(usize, f64)>,
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridAxes>,
}

fn default_stop_tol() -> f64 {
    deltaclip_core::optimizers::DEFAULT_STOP_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveConfig {
    Quadratic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        diag: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<f64>>>,
    },
    Mlp {
        widths: Vec<usize>,
        hidden: Activation,
        output: Activation,
        dataset: DatasetConfig,
    },
    Neurotron {
        filter_dim: usize,
        input_dim: usize,
        #[serde(default = "one")]
        gates: usize,
        #[serde(default)]
        matrices: MatrixKind,
        #[serde(default)]
        beta_flip: f64,
        #[serde(default)]
        noise_magnitude: f64,
        batch: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    #[default]
    Identity,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetConfig {
    RandomUnit { samples: usize, target_low: f64, target_high: f64 },
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub kind: StepRuleKind,
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl OptimizerConfig {
    pub fn rule(&self) -> CliResult<StepRule> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::config(format!("optimizer.{name} is required for {:?}", self.kind)))
        };
        let rule = match self.kind {
            StepRuleKind::Constant => StepRule::constant(self.eta),
            StepRuleKind::Gclip => StepRule::gclip(self.eta, need(self.gamma, "gamma")?),
            StepRuleKind::DeltaGclip => {
                StepRule::delta_gclip(self.eta, need(self.gamma, "gamma")?, need(self.delta, "delta")?)
            }
        };
        rule.map_err(|e| CliError::config(format!("optimizer: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitConfig {
    /// Standard Gaussian entries times `scale`. Network weights are drawn
    /// with their per-layer scaling first.
    Gaussian {
        #[serde(default = "unit")]
        scale: f64,
    },
    Point { value: Vec<f64> },
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig::Gaussian { scale: 1.0 }
    }
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxes {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gamma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta: Vec<f64>,
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string_pretty(self).map_err(|_| fmt::Error)?)
    }
}

impl ExperimentConfig {
    /// Reads, parses and validates a config file. Relative dataset paths are
    /// rewritten against the config's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| e.in_file(path))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let ObjectiveConfig::Mlp { dataset: DatasetConfig::Csv { path: p }, .. } = &mut cfg.objective {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if !p.is_file() {
                return Err(CliError::config(format!("objective.dataset.path: {} does not exist", p.display()))
                    .in_file(path));
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        // serde_json messages end with "at line L column C".
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |field: &str, msg: String| Err(CliError::config(format!("{field}: {msg}")));
        if self.version != CONFIG_VERSION {
            return bad("version", format!("unsupported version {}, expected {CONFIG_VERSION}", self.version));
        }
        if !(self.stop_tol >= 0.0 && self.stop_tol.is_finite()) {
            return bad("stop_tol", format!("must be finite and ≥ 0, got {}", self.stop_tol));
        }
        self.optimizer.rule()?;
        Schedule::new(self.schedule.clone()).map_err(|e| CliError::config(format!("schedule: {e}")))?;
        match &self.objective {
            ObjectiveConfig::Quadratic { diag, matrix } => match (diag, matrix) {
                (Some(_), Some(_)) => return bad("objective", "give either diag or matrix, not both".into()),
                (None, None) => return bad("objective", "quadratic needs diag or matrix".into()),
                _ => {}
            },
            ObjectiveConfig::Mlp { widths, dataset, .. } => {
                if widths.len() < 2 || widths.last() != Some(&1) || widths.contains(&0) {
                    return bad("objective.widths", "needs ≥ 2 positive entries ending in 1".into());
                }
                if let DatasetConfig::RandomUnit { samples, target_low, target_high } = dataset {
                    if *samples == 0 || !(target_low < target_high) {
                        return bad("objective.dataset", "needs samples ≥ 1 and target_low < target_high".into());
                    }
                }
            }
            ObjectiveConfig::Neurotron { filter_dim, input_dim, gates, matrices, batch, .. } => {
                if *filter_dim == 0 || *input_dim == 0 || *gates == 0 || *batch == 0 {
                    return bad("objective", "dimensions, gates and batch must be ≥ 1".into());
                }
                if *matrices == MatrixKind::Identity && filter_dim != input_dim {
                    return bad("objective.matrices", "identity matrices need filter_dim = input_dim".into());
                }
                if self.optimizer.kind != StepRuleKind::Constant {
                    return bad("optimizer.kind", "Neuro-Tron uses a constant step".into());
                }
                if self.noise.is_some() {
                    return bad("noise", "Neuro-Tron draws its own batches; remove the noise block".into());
                }
            }
        }
        if let InitConfig::Gaussian { scale } = self.init {
            if !(scale >= 0.0 && scale.is_finite()) {
                return bad("init.scale", format!("must be finite and ≥ 0, got {scale}"));
            }
        }
        if let Some(n) = &self.noise {
            if !(n.theta >= 0.0 && n.theta.is_finite()) {
                return bad("noise.theta", format!("must be finite and ≥ 0, got {}", n.theta));
            }
            if self.optimizer.kind != StepRuleKind::DeltaGclip {
                return bad("optimizer.kind", "stochastic runs use delta-gclip".into());
            }
            if n.epsilon.is_some() && n.theta == 0.0 {
                return bad("noise.epsilon", "the recipe needs theta > 0".into());
            }
        }
        if let Some(g) = &self.grid {
            if g.eta.is_empty() && g.gamma.is_empty() && g.delta.is_empty() {
                return bad("grid", "at least one axis must be non-empty".into());
            }
            for cell in self.grid_cells() {
                cell.rule().map_err(|e| e.in_field("grid"))?;
            }
        }
        Ok(())
    }

    /// Cartesian product of the grid axes; absent axes take the base optimizer value.
    pub fn grid_cells(&self) -> Vec<OptimizerConfig> {
        let base = self.optimizer;
        let Some(g) = &self.grid else { return vec![base] };
        let axis = |v: &[f64], d: Option<f64>| if v.is_empty() { vec![d] } else { v.iter().map(|&x| Some(x)).collect() };
        let mut cells = Vec::new();
        for eta in axis(&g.eta, Some(base.eta)) {
            for gamma in axis(&g.gamma, base.gamma) {
                for delta in axis(&g.delta, base.delta) {
                    cells.push(OptimizerConfig { kind: base.kind, eta: eta.unwrap(), gamma, delta });
                }
            }
        }
        cells
    }

    pub fn with_optimizer(&self, optimizer: OptimizerConfig) -> Self {
        ExperimentConfig { optimizer, grid: None, ..self.clone() }
    }
}
