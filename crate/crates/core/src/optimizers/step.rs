use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRuleKind {
    /// Plain gradient descent, `h = η`.
    Constant,
    /// `h = η · min{1, γ/‖g‖}`
    Gclip,
    /// `h = η · min{1, max{δ, γ/‖g‖}}`
    DeltaGclip,
}

/// A validated step-size rule. Parameters are checked once at construction so
/// that [`StepRule::step_size`] is total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRule {
    kind: StepRuleKind,
    eta: f64,
    gamma: f64,
    delta: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl StepRule {
    pub fn constant(eta: f64) -> Result<Self> {
        positive("eta", eta)?;
        Ok(StepRule { kind: StepRuleKind::Constant, eta, gamma: f64::INFINITY, delta: 1.0 })
    }

    pub fn gclip(eta: f64, gamma: f64) -> Result<Self> {
        positive("eta", eta)?;
        positive("gamma", gamma)?;
        Ok(StepRule { kind: StepRuleKind::Gclip, eta, gamma, delta: 0.0 })
    }

    pub fn delta_gclip(eta: f64, gamma: f64, delta: f64) -> Result<Self> {
        positive("eta", eta)?;
        positive("gamma", gamma)?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
        }
        Ok(StepRule { kind: StepRuleKind::DeltaGclip, eta, gamma, delta })
    }

    /// Builds a rule of `kind`; `gamma`/`delta` are ignored where they do not apply.
    pub fn from_parts(kind: StepRuleKind, eta: f64, gamma: f64, delta: f64) -> Result<Self> {
        match kind {
            StepRuleKind::Constant => StepRule::constant(eta),
            StepRuleKind::Gclip => StepRule::gclip(eta, gamma),
            StepRuleKind::DeltaGclip => StepRule::delta_gclip(eta, gamma, delta),
        }
    }

    pub fn kind(&self) -> StepRuleKind {
        self.kind
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The floor multiplier: `δ` for δ-GClip, `1` for constant steps, `0` for GClip.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same rule with η replaced.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        positive("eta", eta)?;
        Ok(StepRule { eta, ..*self })
    }

    /// Smallest step the rule can emit.
    pub fn min_step(&self) -> f64 {
        match self.kind {
            StepRuleKind::Constant => self.eta,
            StepRuleKind::Gclip => 0.0,
            StepRuleKind::DeltaGclip => self.eta * self.delta,
        }
    }

    /// `h` for a gradient of norm `grad_norm`. A zero gradient takes `γ/0 = +∞`,
    /// so `h = η` there.
    pub fn step_size(&self, grad_norm: f64) -> f64 {
        debug_assert!(!(grad_norm < 0.0), "gradient norm must be non-negative");
        match self.kind {
            StepRuleKind::Constant => self.eta,
            StepRuleKind::Gclip => self.eta * f64::min(1.0, self.gamma / grad_norm),
            StepRuleKind::DeltaGclip => {
                self.eta * f64::min(1.0, f64::max(self.delta, self.gamma / grad_norm))
            }
        }
    }
}

pub fn step_size(rule: &StepRule, grad_norm: f64) -> f64 {
    rule.step_size(grad_norm)
}
