//! Turns a validated config into a concrete objective and starting point.

use deltaclip_core::objectives::MlpArch;
use deltaclip_core::optimizers::NeurotronProblem;
use deltaclip_core::tensor::gaussian_matrix;
use deltaclip_core::{Dataset, Matrix, MlpObjective, Objective, QuadraticObjective, RngStream, Vector};
use sha2::{Digest, Sha256};

use crate::config::{DatasetConfig, ExperimentConfig, InitConfig, MatrixKind, ObjectiveConfig, OptimizerConfig};
use crate::error::{CliError, CliResult};

/// Stream used to draw the problem instance (data, teacher, starting point).
pub const SETUP_STREAM: u64 = 0;

pub enum Problem {
    Quadratic(QuadraticObjective),
    Mlp(MlpObjective),
    Neurotron { problem: NeurotronProblem, batch: usize },
}

pub struct Setup {
    pub problem: Problem,
    pub w0: Vector,
}

impl Problem {
    pub fn objective(&self) -> Option<&dyn Objective> {
        match self {
            Problem::Quadratic(q) => Some(q),
            Problem::Mlp(m) => Some(m),
            Problem::Neurotron { .. } => None,
        }
    }
}

fn setup_err(field: &str) -> impl Fn(deltaclip_core::Error) -> CliError + '_ {
    move |e| CliError::config(format!("{field}: {e}"))
}

fn start_point(init: &InitConfig, dim: usize, draw: impl FnOnce() -> Vector) -> CliResult<Vector> {
    match init {
        InitConfig::Gaussian { scale } => Ok(draw().scaled(*scale)),
        InitConfig::Point { value } if value.len() == dim => Ok(Vector::from_vec(value.clone())),
        InitConfig::Point { value } => Err(CliError::config(format!(
            "init.value: expected {dim} entries, got {}",
            value.len()
        ))),
    }
}

fn problem_matrix(kind: MatrixKind, rows: usize, cols: usize, rng: &mut RngStream) -> CliResult<Matrix> {
    match kind {
        MatrixKind::Identity => Ok(Matrix::identity(rows)),
        MatrixKind::Gaussian => {
            let mut m = gaussian_matrix(rows, cols, rng)?;
            let s = 1.0 / (cols as f64).sqrt();
            m.data_mut().iter_mut().for_each(|x| *x *= s);
            Ok(m)
        }
    }
}

/// Builds the problem instance from the config seed. The instance does not
/// depend on the optimizer settings, so every grid cell sees the same one.
pub fn build(cfg: &ExperimentConfig) -> CliResult<Setup> {
    let mut rng = RngStream::new(cfg.seed, SETUP_STREAM);
    match &cfg.objective {
        ObjectiveConfig::Quadratic { diag, matrix } => {
            let a = match (diag, matrix) {
                (Some(d), None) => Matrix::from_diag(d),
                (None, Some(rows)) => Matrix::from_rows(rows).map_err(setup_err("objective.matrix"))?,
                _ => unreachable!("validated"),
            };
            let q = QuadraticObjective::new(a).map_err(setup_err("objective"))?;
            let dim = q.dim();
            let w0 = start_point(&cfg.init, dim, || Vector::gaussian(dim, &mut rng))?;
            Ok(Setup { problem: Problem::Quadratic(q), w0 })
        }
        ObjectiveConfig::Mlp { widths, hidden, output, dataset } => {
            let arch = MlpArch::new(widths.clone(), *hidden, *output).map_err(setup_err("objective"))?;
            let data = match dataset {
                DatasetConfig::RandomUnit { samples, target_low, target_high } => {
                    Dataset::random_unit(*samples, widths[0], *target_low, *target_high, &mut rng)
                }
                DatasetConfig::Csv { path } => Dataset::from_csv_path(path),
            }
            .map_err(setup_err("objective.dataset"))?;
            if data.input_dim() != widths[0] {
                return Err(CliError::config(format!(
                    "objective.dataset: {} features per sample, widths[0] is {}",
                    data.input_dim(),
                    widths[0]
                )));
            }
            let w0 = start_point(&cfg.init, arch.param_count(), || arch.gaussian_weights(&mut rng))?;
            let obj = MlpObjective::new(arch, data).map_err(setup_err("objective"))?;
            Ok(Setup { problem: Problem::Mlp(obj), w0 })
        }
        ObjectiveConfig::Neurotron { filter_dim, input_dim, gates, matrices, beta_flip, noise_magnitude, batch } => {
            let (r, n) = (*filter_dim, *input_dim);
            let sensing = problem_matrix(*matrices, r, n, &mut rng)?;
            let gate_list = (0..*gates)
                .map(|_| problem_matrix(*matrices, r, n, &mut rng))
                .collect::<CliResult<Vec<_>>>()?;
            let w_star = Vector::gaussian(r, &mut rng);
            let problem = NeurotronProblem::new(sensing, gate_list, w_star, *beta_flip, *noise_magnitude)
                .map_err(setup_err("objective"))?;
            let w0 = start_point(&cfg.init, r, || Vector::gaussian(r, &mut rng))?;
            Ok(Setup { problem: Problem::Neurotron { problem, batch: *batch }, w0 })
        }
    }
}

/// Stream for the randomness consumed while running (oracle noise or
/// Neuro-Tron batches), keyed by the seed and the optimizer parameters so a
/// grid cell's draws do not depend on its position in the grid.
pub fn run_stream(seed: u64, opt: &OptimizerConfig) -> RngStream {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(format!("{:?}", opt.kind).as_bytes());
    for v in [Some(opt.eta), opt.gamma, opt.delta] {
        h.update(v.map_or(u64::MAX, f64::to_bits).to_le_bytes());
    }
    let digest = h.finalize();
    let stream = u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"));
    RngStream::new(seed, stream)
}
