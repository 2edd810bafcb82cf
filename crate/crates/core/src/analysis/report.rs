use serde::{Deserialize, Serialize};

use crate::analysis::{ball_check, envelope_check};
use crate::error::{invalid, Result};
use crate::optimizers::Trajectory;

/// Per-step loss contraction guaranteed for δ-GClip on a μ-PL*, β-smooth loss:
/// `1 − ½·ηδμ`.
pub fn rate_factor(eta: f64, delta: f64, mu: f64) -> f64 {
    1.0 - 0.5 * eta * delta * mu
}

/// The sharper factor `1 − ηδμ` that appears at the end of the main proof.
/// Reported alongside [`rate_factor`], never checked.
pub fn rate_factor_proof(eta: f64, delta: f64, mu: f64) -> f64 {
    1.0 - eta * delta * mu
}

/// Radius of the ball around `w₀` that contains every δ-GClip iterate:
/// `R = η·√(2β)·√L(w₀) / (1 − √(1 − ½ηδμ))`.
pub fn pl_radius(eta: f64, beta: f64, delta: f64, mu: f64, l0: f64) -> Result<f64> {
    for (name, v) in [("eta", eta), ("beta", beta), ("mu", mu)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(format!("{name} must be positive and finite, got {v}")));
        }
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(l0 >= 0.0 && l0.is_finite()) {
        return Err(invalid(format!("initial loss must be finite and ≥ 0, got {l0}")));
    }
    let x = 0.5 * eta * delta * mu;
    if x >= 1.0 {
        return Err(invalid(format!("eta·delta·mu = {} must be below 2", 2.0 * x)));
    }
    // 1 − √(1 − x) = x / (1 + √(1 − x)), without the cancellation.
    let denom = x / (1.0 + (1.0 - x).sqrt());
    Ok(eta * (2.0 * beta).sqrt() * l0.sqrt() / denom)
}

/// Theory quantities for one run, paired with what the run did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub mu: f64,
    pub beta: f64,
    pub lambda0: Option<f64>,
    #[serde(rename = "radius_R")]
    pub radius_r: f64,
    pub rate_factor: f64,
    pub envelope_ok: bool,
    pub max_envelope_violation: f64,
    pub radius_ok: bool,
}

impl TheoremReport {
    /// Builds the report for a δ-GClip trajectory with step parameters
    /// `(eta, delta)` on a loss with constants `(mu, beta)`.
    pub fn evaluate(
        traj: &Trajectory,
        eta: f64,
        delta: f64,
        mu: f64,
        beta: f64,
        lambda0: Option<f64>,
    ) -> Result<Self> {
        if traj.records.is_empty() {
            return Err(invalid("empty trajectory"));
        }
        let radius_r = pl_radius(eta, beta, delta, mu, traj.initial_loss())?;
        let rate = rate_factor(eta, delta, mu);
        if eta < 1.0 / mu {
            assert!(rate > 0.5 && rate < 1.0, "rate factor {rate} outside (1/2, 1)");
        }
        let (envelope_ok, max_envelope_violation) = envelope_check(traj, eta, delta, mu);
        Ok(TheoremReport {
            mu,
            beta,
            lambda0,
            radius_r,
            rate_factor: rate,
            envelope_ok,
            max_envelope_violation,
            radius_ok: ball_check(traj, radius_r),
        })
    }
}
