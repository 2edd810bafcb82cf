use serde::{Deserialize, Serialize};

use crate::tensor::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxIterations,
    /// Gradient norm fell to the stop tolerance.
    Converged,
    /// A loss or gradient became non-finite; the trajectory ends at the last finite iterate.
    Diverged,
}

/// One row of a trace: the state at `w_t` and the step size applied there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: usize,
    pub loss: f64,
    pub grad_norm: f64,
    pub step_size: f64,
    pub dist_from_init: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    pub final_weights: Vector,
    pub termination: Termination,
}

impl Trajectory {
    /// Steps actually taken.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn initial_loss(&self) -> f64 {
        self.records[0].loss
    }

    pub fn final_loss(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.loss)
    }

    pub fn min_loss(&self) -> f64 {
        self.records.iter().map(|r| r.loss).fold(f64::INFINITY, f64::min)
    }

    pub fn min_grad_norm_sq(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.grad_norm * r.grad_norm)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_dist_from_init(&self) -> f64 {
        self.records.iter().map(|r| r.dist_from_init).fold(0.0, f64::max)
    }

    /// `(loss, grad_norm)` pairs, the input of the empirical PL* estimate.
    pub fn loss_grad_points(&self) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.loss, r.grad_norm)).collect()
    }

    /// Copy truncated to the first `len` records.
    pub fn prefix(&self, len: usize) -> Trajectory {
        Trajectory {
            records: self.records[..len.min(self.records.len())].to_vec(),
            final_weights: self.final_weights.clone(),
            termination: self.termination,
        }
    }

    pub fn diverged(&self) -> bool {
        self.termination == Termination::Diverged
    }
}
