//! Mini-batched Neuro-Tron for a single-filter, multi-gate ReLU model.
//!
//! The model class is `f_w(x) = (1/k) Σᵢ max(0, ⟨w, Aᵢx⟩)` with gate matrices
//! `Aᵢ ∈ R^{r×n}`. Labels come from a teacher filter `w*` and are corrupted,
//! with probability `β_flip`, by an additive scalar of fixed magnitude and
//! random sign.

use crate::error::{check_dim, invalid, Result};
use crate::optimizers::{Termination, Trajectory, TrajectoryRecord};
use crate::rng::RngStream;
use crate::tensor::{Matrix, Vector};

#[derive(Debug, Clone)]
pub struct NeurotronProblem {
    sensing: Matrix,
    gates: Vec<Matrix>,
    w_star: Vector,
    beta_flip: f64,
    noise_magnitude: f64,
}

impl NeurotronProblem {
    pub fn new(
        sensing: Matrix,
        gates: Vec<Matrix>,
        w_star: Vector,
        beta_flip: f64,
        noise_magnitude: f64,
    ) -> Result<Self> {
        let (r, n) = (sensing.rows(), sensing.cols());
        if gates.is_empty() {
            return Err(invalid("Neuro-Tron needs at least one gate"));
        }
        for a in &gates {
            if a.rows() != r || a.cols() != n {
                return Err(invalid(format!(
                    "gate shape {}x{} differs from sensing matrix {r}x{n}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        check_dim(r, w_star.dim())?;
        if !(0.0..1.0).contains(&beta_flip) {
            return Err(invalid(format!("label-flip probability must lie in [0, 1), got {beta_flip}")));
        }
        if !(noise_magnitude >= 0.0 && noise_magnitude.is_finite()) {
            return Err(invalid(format!("noise magnitude must be finite and ≥ 0, got {noise_magnitude}")));
        }
        Ok(NeurotronProblem { sensing, gates, w_star, beta_flip, noise_magnitude })
    }

    /// `k = 1`, `A₁ = M = I_r`.
    pub fn identity(w_star: Vector, beta_flip: f64, noise_magnitude: f64) -> Result<Self> {
        let r = w_star.dim();
        NeurotronProblem::new(Matrix::identity(r), vec![Matrix::identity(r)], w_star, beta_flip, noise_magnitude)
    }

    pub fn filter_dim(&self) -> usize {
        self.sensing.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.sensing.cols()
    }

    pub fn w_star(&self) -> &Vector {
        &self.w_star
    }

    /// Gate images `Aᵢx`, shared between teacher and student evaluations.
    fn gate_images(&self, x: &[f64]) -> Vec<Vector> {
        self.gates
            .iter()
            .map(|a| a.matvec(x).expect("input has the declared dimension"))
            .collect()
    }

    fn eval_on_images(&self, w: &Vector, images: &[Vector]) -> f64 {
        let k = images.len() as f64;
        images.iter().map(|u| w.dot(u).max(0.0)).sum::<f64>() / k
    }

    pub fn eval(&self, w: &Vector, x: &[f64]) -> Result<f64> {
        check_dim(self.filter_dim(), w.dim())?;
        check_dim(self.input_dim(), x.len())?;
        Ok(self.eval_on_images(w, &self.gate_images(x)))
    }

    /// One Tron-gradient `M · (1/b) Σ (v_i − f_w(x_i)) x_i` on a fresh batch.
    fn tron_gradient(&self, w: &Vector, batch: usize, rng: &mut RngStream) -> Vector {
        let n = self.input_dim();
        let mut acc = vec![0.0; n];
        for _ in 0..batch {
            let x = Vector::gaussian(n, rng);
            let images = self.gate_images(&x);
            let mut v = self.eval_on_images(&self.w_star, &images);
            if self.beta_flip > 0.0 && rng.bernoulli(self.beta_flip) {
                v += rng.sign() * self.noise_magnitude;
            }
            let residual = v - self.eval_on_images(w, &images);
            for (a, xi) in acc.iter_mut().zip(x.iter()) {
                *a += residual * xi;
            }
        }
        let inv_b = 1.0 / batch as f64;
        acc.iter_mut().for_each(|a| *a *= inv_b);
        self.sensing.matvec(&acc).expect("accumulator has the input dimension")
    }
}

/// Runs `iterations` Neuro-Tron updates `w ← w + η·g` from `w1`.
///
/// The loss column records `‖w_t − w*‖`, the gradient column `‖g_t‖` of the
/// batch drawn at `w_t`, and the step column `η`.
pub fn neurotron_run(
    p: &NeurotronProblem,
    w1: &Vector,
    iterations: usize,
    batch: usize,
    eta: f64,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    check_dim(p.filter_dim(), w1.dim())?;
    if batch == 0 {
        return Err(invalid("batch size must be at least 1"));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid(format!("eta must be positive and finite, got {eta}")));
    }
    if !w1.is_finite() {
        return Err(invalid("starting point has non-finite entries"));
    }
    let mut w = w1.clone();
    let mut records = Vec::with_capacity(iterations + 1);
    let mut t = 0;
    let termination = loop {
        let g = p.tron_gradient(&w, batch, rng);
        let grad_norm = g.l2_norm();
        if !grad_norm.is_finite() {
            break Termination::Diverged;
        }
        records.push(TrajectoryRecord {
            t,
            loss: w.distance(&p.w_star),
            grad_norm,
            step_size: eta,
            dist_from_init: w.distance(w1),
        });
        if t == iterations {
            break Termination::MaxIterations;
        }
        let next = Vector::from_vec(w.iter().zip(g.iter()).map(|(wi, gi)| wi + eta * gi).collect());
        if !next.is_finite() {
            break Termination::Diverged;
        }
        w = next;
        t += 1;
    };
    Ok(Trajectory { records, final_weights: w, termination })
}
