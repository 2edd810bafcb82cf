//! Step-size recipe and criticality bound for stochastic δ-GClip under a
//! θ-bounded unbiased oracle on a β-smooth, non-negative loss.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticParams {
    pub epsilon: f64,
    pub theta: f64,
    pub epsilon_prime: f64,
    pub beta: f64,
    pub delta: f64,
    pub eta: f64,
    #[serde(rename = "T")]
    pub iterations: usize,
}

impl StochasticParams {
    /// `η/2·(3δ − 1) − βη²`, the coefficient that must stay positive.
    pub fn denominator(&self) -> f64 {
        0.5 * self.eta * (3.0 * self.delta - 1.0) - self.beta * self.eta * self.eta
    }

    /// Coefficient of `θ²` in the raw bound:
    /// `(2βη² + η(1 − δ)) / (2·denominator)`, below `ε′²` for admissible parameters.
    pub fn noise_coefficient(&self) -> f64 {
        (2.0 * self.beta * self.eta * self.eta + self.eta * (1.0 - self.delta))
            / (2.0 * self.denominator())
    }

    /// Whether `(δ, η)` lie strictly inside the admissible intervals.
    pub fn admissible(&self) -> bool {
        let (d_lo, eta_hi) = theorem_intervals(self.epsilon_prime, self.delta, self.beta);
        self.delta > d_lo && self.delta < 1.0 && self.eta > 0.0 && self.eta < eta_hi
            && self.denominator() > 0.0
    }
}

/// Lower end of the δ interval and upper end of the η interval for a given
/// `ε′`, `δ` and `β`:
/// `δ > (1 + ε′²)/(1 + 3ε′²)` and `η < (δ(1 + 3ε′²) − (1 + ε′²)) / (2β(1 + ε′²))`.
pub fn theorem_intervals(epsilon_prime: f64, delta: f64, beta: f64) -> (f64, f64) {
    let e2 = epsilon_prime * epsilon_prime;
    let delta_lo = (1.0 + e2) / (1.0 + 3.0 * e2);
    let eta_hi = (delta * (1.0 + 3.0 * e2) - (1.0 + e2)) / (2.0 * beta * (1.0 + e2));
    (delta_lo, eta_hi)
}

/// The β = 1 recipe: `δ = (1 + 2ε′²)/(1 + 3ε′²)`, `η = (ε′²/4)/(1 + ε′²)`,
/// `T = θ⁴/ε⁴` (rounded up), with `ε′ = ε/θ`.
pub fn stochastic_params(epsilon: f64, theta: f64) -> Result<StochasticParams> {
    if !(epsilon > 0.0 && epsilon.is_finite() && theta > 0.0 && theta.is_finite()) {
        return Err(invalid(format!(
            "epsilon and theta must be positive and finite, got {epsilon}, {theta}"
        )));
    }
    let ep = epsilon / theta;
    let e2 = ep * ep;
    let delta = (1.0 + 2.0 * e2) / (1.0 + 3.0 * e2);
    let eta = (0.25 * e2) / (1.0 + e2);
    let t = (1.0 / (e2 * e2)).ceil();
    if !(t.is_finite() && t < usize::MAX as f64) {
        return Err(invalid(format!("epsilon/theta = {ep} needs too many iterations")));
    }
    let p = StochasticParams {
        epsilon,
        theta,
        epsilon_prime: ep,
        beta: 1.0,
        delta,
        eta,
        iterations: (t as usize).max(1),
    };
    if !p.admissible() {
        return Err(invalid(format!("recipe left the admissible region at epsilon' = {ep}")));
    }
    Ok(p)
}

fn checked_denominator(p: &StochasticParams, l1: f64) -> Result<f64> {
    if !(l1 >= 0.0 && l1.is_finite()) {
        return Err(invalid(format!("initial loss must be finite and ≥ 0, got {l1}")));
    }
    let d = p.denominator();
    if !(d > 0.0) {
        return Err(invalid(format!("step parameters violate the hypotheses (denominator {d})")));
    }
    Ok(d)
}

/// `ε² + L(w₁) / (T·(η/2·(3δ − 1) − βη²))`.
pub fn stochastic_bound(p: &StochasticParams, l1: f64) -> Result<f64> {
    let d = checked_denominator(p, l1)?;
    Ok(p.epsilon * p.epsilon + l1 / (p.iterations as f64 * d))
}

/// The same bound with the noise term left as `θ²·noise_coefficient`
/// instead of being relaxed to `ε²`.
pub fn stochastic_bound_raw(p: &StochasticParams, l1: f64) -> Result<f64> {
    let d = checked_denominator(p, l1)?;
    Ok(p.theta * p.theta * p.noise_coefficient() + l1 / (p.iterations as f64 * d))
}
