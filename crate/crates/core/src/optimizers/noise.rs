use crate::error::{invalid, Result};
use crate::rng::RngStream;
use crate::tensor::Vector;

/// Unbiased gradient oracle with noise bounded by `θ` in Euclidean norm.
///
/// The perturbation has a uniformly random direction and radius `ρ·θ` with
/// `ρ ~ U[0, 1)`. The law is symmetric about zero, so the oracle is unbiased.
#[derive(Debug, Clone)]
pub struct NoiseOracle {
    theta: f64,
    rng: RngStream,
}

impl NoiseOracle {
    pub fn new(theta: f64, rng: RngStream) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(invalid(format!("noise radius must be finite and non-negative, got {theta}")));
        }
        Ok(NoiseOracle { theta, rng })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// A perturbation `ξ` with `‖ξ‖ ≤ θ`.
    pub fn sample(&mut self, dim: usize) -> Vector {
        if self.theta == 0.0 {
            return Vector::zeros(dim);
        }
        let dir = Vector::gaussian(dim, &mut self.rng);
        let norm = dir.l2_norm();
        if norm == 0.0 {
            return Vector::zeros(dim);
        }
        let radius = self.rng.uniform() * self.theta;
        let mut xi = dir.scaled(radius / norm);
        // Rounding can push the norm a few ulps past θ when ρ is close to 1.
        let got = xi.l2_norm();
        if got > self.theta {
            xi = xi.scaled(self.theta / got * (1.0 - f64::EPSILON));
        }
        xi
    }

    /// `g = ∇L(w) + ξ`.
    pub fn perturb(&mut self, grad: &Vector) -> Vector {
        let xi = self.sample(grad.dim());
        let g = grad.add(&xi);
        debug_assert!(
            g.distance(grad) <= self.theta * (1.0 + 1e-12),
            "oracle noise exceeds θ"
        );
        g
    }
}

pub fn sample_noise(oracle: &mut NoiseOracle, dim: usize) -> Vector {
    oracle.sample(dim)
}
