//! One-shot theory check of a configured problem.

use deltaclip_core::analysis::{descent_check, gradcheck, gradient_bound_check};
use deltaclip_core::{RngStream, StepRuleKind};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::harness::{execute, ConstantsSource, Execution};
use crate::problem::Problem;

pub const GRADCHECK_TOL_QUADRATIC: f64 = 1e-9;
pub const GRADCHECK_TOL_MLP: f64 = 1e-5;
/// Random gradient norms probed by the step-size check, on top of the recorded ones.
pub const SANDWICH_PROBES: usize = 10_000;
/// `λ₀` must exceed this fraction of `λ_max` to count as positive; a
/// rank-deficient kernel lands at rounding level below it.
pub const NTK_RELATIVE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Measured quantity (violation magnitude, discrepancy, eigenvalue, ...).
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub note: String,
}

impl Check {
    fn measured(name: &'static str, ok: bool, value: f64, threshold: Option<f64>, note: impl Into<String>) -> Self {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        Check { name, status, value: Some(value), threshold, note: note.into() }
    }

    fn skipped(name: &'static str, note: impl Into<String>) -> Self {
        Check { name, status: CheckStatus::Skipped, value: None, threshold: None, note: note.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub ok: bool,
    pub status: String,
    pub checks: Vec<Check>,
}

impl Verdict {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn verify(cfg: &ExperimentConfig) -> CliResult<(Execution, Verdict)> {
    let exec = execute(cfg)?;
    let checks = vec![
        gradient_check(&exec),
        sandwich_check(&exec),
        envelope(&exec),
        ball(&exec),
        descent(&exec),
        gradient_bound(&exec),
        ntk_lambda0(&exec),
        pl_consistency(&exec),
    ];
    let ok = checks.iter().all(|c| c.status != CheckStatus::Fail);
    let status = crate::harness::status(exec.trajectory.termination).to_string();
    Ok((exec, Verdict { ok, status, checks }))
}

fn gradient_check(exec: &Execution) -> Check {
    let tol = match exec.setup.problem {
        Problem::Quadratic(_) => GRADCHECK_TOL_QUADRATIC,
        Problem::Mlp(_) => GRADCHECK_TOL_MLP,
        Problem::Neurotron { .. } => return Check::skipped("gradcheck", "Neuro-Tron has no loss gradient"),
    };
    let obj = exec.objective().expect("has an objective");
    let d = gradcheck(obj, &exec.setup.w0);
    Check::measured("gradcheck", d <= tol, d, Some(tol), "central differences at the starting point")
}

/// Every recorded step size, and the rule on random norms, stays inside the
/// rule's bounds at the scheduled η.
fn sandwich_check(exec: &Execution) -> Check {
    let rule = exec.rule();
    let schedule = exec.schedule();
    let bounds = |eta: f64| match rule.kind() {
        StepRuleKind::Constant => (eta, eta),
        StepRuleKind::Gclip => (0.0, eta),
        StepRuleKind::DeltaGclip => (eta * rule.delta(), eta),
    };
    let mut violations = 0usize;
    for r in &exec.trajectory.records {
        let (lo, hi) = bounds(schedule.eta_at(rule.eta(), r.t));
        if !(lo <= r.step_size && r.step_size <= hi) {
            violations += 1;
        }
    }
    let mut rng = RngStream::new(exec.config.seed, u64::MAX);
    let (lo, hi) = bounds(rule.eta());
    for i in 0..SANDWICH_PROBES {
        let g = if i == 0 { 0.0 } else { rng.log_uniform(1e-12, 1e12) };
        let h = rule.step_size(g);
        if !(lo <= h && h <= hi) {
            violations += 1;
        }
    }
    Check::measured(
        "step_size_sandwich",
        violations == 0,
        violations as f64,
        Some(0.0),
        format!("recorded steps plus {SANDWICH_PROBES} probe norms; value counts violations"),
    )
}

fn theorem_skip(exec: &Execution, name: &'static str) -> Check {
    let note = &exec.analysis.theorem_note;
    if note.starts_with("hypotheses-not-met") {
        Check::skipped(name, "hypotheses-not-met, skipped")
    } else {
        Check::skipped(name, note.clone())
    }
}

fn envelope(exec: &Execution) -> Check {
    match &exec.analysis.theorem {
        Some(t) => Check::measured(
            "envelope",
            t.envelope_ok,
            t.max_envelope_violation,
            Some(0.0),
            format!("L_t ≤ L_0·{}^t; value is the worst excess relative to L_0", t.rate_factor),
        ),
        None => theorem_skip(exec, "envelope"),
    }
}

fn ball(exec: &Execution) -> Check {
    match &exec.analysis.theorem {
        Some(t) => Check::measured(
            "ball",
            t.radius_ok,
            exec.trajectory.max_dist_from_init(),
            Some(t.radius_r),
            "largest distance from the start vs the trust radius",
        ),
        None => theorem_skip(exec, "ball"),
    }
}

fn deterministic_constants(exec: &Execution) -> Result<f64, Check> {
    if exec.config.noise.is_some() {
        return Err(Check::skipped("", "not applicable: stochastic run"));
    }
    match exec.analysis.constants {
        Some(c) => Ok(c.beta),
        None => Err(Check::skipped("", "not applicable: constants unavailable")),
    }
}

fn descent(exec: &Execution) -> Check {
    let beta = match deterministic_constants(exec) {
        Ok(b) => b,
        Err(c) => return Check { name: "descent", ..c },
    };
    if exec.rule().eta() >= 1.0 / beta {
        return Check::skipped("descent", "hypotheses-not-met, skipped");
    }
    let (ok, worst) = descent_check(&exec.trajectory);
    Check::measured("descent", ok, worst, Some(0.0), "L_{t+1} ≤ L_t − (h_t/2)‖∇L_t‖² at every step")
}

fn gradient_bound(exec: &Execution) -> Check {
    let beta = match deterministic_constants(exec) {
        Ok(b) => b,
        Err(c) => return Check { name: "gradient_bound", ..c },
    };
    let (ok, worst) = gradient_bound_check(&exec.trajectory, beta);
    let note = match exec.analysis.constants.map(|c| c.source) {
        Some(ConstantsSource::Estimated) => "‖∇L‖ ≤ √(2βL) with the estimated β",
        _ => "‖∇L‖ ≤ √(2βL)",
    };
    Check::measured("gradient_bound", ok, worst, Some(0.0), note)
}

fn ntk_lambda0(exec: &Execution) -> Check {
    match exec.analysis.ntk {
        Some(s) => {
            let floor = NTK_RELATIVE_FLOOR * s.lambda_max;
            Check::measured("ntk_lambda0", s.lambda0 > floor, s.lambda0, Some(floor), "λ_min of the tangent kernel at w_0")
        }
        None => Check::skipped("ntk_lambda0", "not applicable: no network"),
    }
}

fn pl_consistency(exec: &Execution) -> Check {
    let (Some(s), Some(pl)) = (exec.analysis.ntk, exec.analysis.empirical_pl) else {
        return Check::skipped("pl_consistency", "not applicable: no network or no positive losses");
    };
    let Some(cand) = s.mu_candidate else {
        return Check::skipped("pl_consistency", "output activation has no derivative lower bound");
    };
    let threshold = 0.5 * cand;
    Check::measured(
        "pl_consistency",
        pl >= threshold,
        pl,
        Some(threshold),
        "empirical PL constant along the run vs ½·λ₀ρ²",
    )
}
