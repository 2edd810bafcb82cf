//! Executes one configured run and derives its theory report.

use std::time::{Duration, Instant};

use deltaclip_core::analysis::{
    empirical_pl, ntk_summary, rate_factor_proof, stochastic_bound, stochastic_bound_raw,
    stochastic_params, NtkSummary, StochasticParams, TheoremReport,
};
use deltaclip_core::optimizers::{neurotron_run, run_deterministic, run_deterministic_observed, run_stochastic};
use deltaclip_core::{NoiseOracle, Objective, Schedule, StepRule, StepRuleKind, Termination, Trajectory};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, OptimizerConfig};
use crate::error::{CliError, CliResult};
use crate::problem::{build, run_stream, Problem, Setup};

/// Where the smoothness and PL constants come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsSource {
    /// Closed form (quadratics).
    Exact,
    /// `μ = min(empirical PL, λ₀ρ²)`, `β = max(λ_max(K(w₀)), largest gradient secant seen)`.
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub mu: f64,
    pub beta: f64,
    pub source: ConstantsSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticSummary {
    pub params: StochasticParams,
    /// The recipe assumes a 1-smooth loss.
    pub applicable: bool,
    pub bound: Option<f64>,
    pub bound_raw: Option<f64>,
    /// `min ‖∇L(w_t)‖²` over the first `T` iterates of this run.
    pub min_grad_norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub constants: Option<Constants>,
    pub ntk: Option<NtkSummary>,
    pub empirical_pl: Option<f64>,
    /// `η < 1/β` and `η < 1/μ` for a deterministic, unscheduled δ-GClip run.
    pub hypotheses_met: bool,
    pub theorem: Option<TheoremReport>,
    pub theorem_note: String,
    /// `1 − ηδμ`, the factor from the closing line of the convergence proof.
    pub rate_factor_proof: Option<f64>,
    pub stochastic: Option<StochasticSummary>,
}

pub struct Execution {
    /// Config with the stochastic recipe, if any, applied.
    pub config: ExperimentConfig,
    pub setup: Setup,
    pub trajectory: Trajectory,
    pub wall_time: Duration,
    pub analysis: Analysis,
}

impl Execution {
    pub fn objective(&self) -> Option<&dyn Objective> {
        self.setup.problem.objective()
    }

    pub fn rule(&self) -> StepRule {
        self.config.optimizer.rule().expect("validated at load")
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::new(self.config.schedule.clone()).expect("validated at load")
    }
}

/// Replaces η, δ and T by the stochastic recipe when `noise.epsilon` is set.
pub fn effective_config(cfg: &ExperimentConfig) -> CliResult<(ExperimentConfig, Option<StochasticParams>)> {
    let Some(eps) = cfg.noise.and_then(|n| n.epsilon) else {
        return Ok((cfg.clone(), None));
    };
    let theta = cfg.noise.expect("epsilon implies noise").theta;
    let p = stochastic_params(eps, theta).map_err(|e| CliError::config(format!("noise: {e}")))?;
    let mut out = cfg.clone();
    out.optimizer = OptimizerConfig { eta: p.eta, delta: Some(p.delta), ..cfg.optimizer };
    out.iterations = p.iterations;
    Ok((out, Some(p)))
}

pub fn execute(cfg: &ExperimentConfig) -> CliResult<Execution> {
    let (config, recipe) = effective_config(cfg)?;
    let setup = build(&config)?;
    let rule = config.optimizer.rule()?;
    let schedule = Schedule::new(config.schedule.clone()).map_err(|e| CliError::config(format!("schedule: {e}")))?;
    let mut stream = run_stream(config.seed, &config.optimizer);
    let mut max_secant = 0.0_f64;
    let start = Instant::now();
    let trajectory = match (&setup.problem, config.noise) {
        (Problem::Neurotron { problem, batch }, _) => {
            neurotron_run(problem, &setup.w0, config.iterations, *batch, rule.eta(), &mut stream)?
        }
        (p, Some(noise)) => {
            let obj = p.objective().expect("not neurotron");
            let mut oracle = NoiseOracle::new(noise.theta, stream)?;
            run_stochastic(obj, &rule, &schedule, &mut oracle, &setup.w0, config.iterations)?
        }
        (Problem::Mlp(obj), None) => run_deterministic_observed(
            obj,
            &rule,
            &schedule,
            &setup.w0,
            config.iterations,
            config.stop_tol,
            |s| {
                let d = s.next.distance(s.w);
                if d > 0.0 {
                    max_secant = max_secant.max(obj.gradient(s.next).distance(s.direction) / d);
                }
            },
        )?,
        (p, None) => {
            let obj = p.objective().expect("not neurotron");
            run_deterministic(obj, &rule, &schedule, &setup.w0, config.iterations, config.stop_tol)?
        }
    };
    let wall_time = start.elapsed();
    let analysis = analyse(&config, &setup, &rule, &trajectory, max_secant, recipe)?;
    Ok(Execution { config, setup, trajectory, wall_time, analysis })
}

fn analyse(
    cfg: &ExperimentConfig,
    setup: &Setup,
    rule: &StepRule,
    traj: &Trajectory,
    max_secant: f64,
    recipe: Option<StochasticParams>,
) -> CliResult<Analysis> {
    let empirical = match setup.problem {
        Problem::Neurotron { .. } => None,
        _ => empirical_pl(&traj.loss_grad_points()).ok(),
    };
    let (constants, ntk) = match &setup.problem {
        Problem::Quadratic(q) => {
            let c = q.constants();
            (Some(Constants { mu: c.mu, beta: c.beta, source: ConstantsSource::Exact }), None)
        }
        Problem::Mlp(obj) => {
            let ntk = ntk_summary(&obj.spec_at(&setup.w0), obj.data()).ok();
            let mu = match (empirical, ntk.and_then(|s| s.mu_candidate)) {
                (Some(e), Some(c)) => Some(e.min(c)),
                (e, c) => e.or(c),
            };
            let beta = ntk.map_or(max_secant, |s| s.lambda_max.max(max_secant));
            let constants = mu
                .filter(|&m| m > 0.0 && beta > 0.0)
                .map(|mu| Constants { mu, beta, source: ConstantsSource::Estimated });
            (constants, ntk)
        }
        Problem::Neurotron { .. } => (None, None),
    };

    let mut analysis = Analysis {
        constants,
        ntk,
        empirical_pl: empirical,
        hypotheses_met: false,
        theorem: None,
        theorem_note: String::new(),
        rate_factor_proof: None,
        stochastic: None,
    };

    if let Some(p) = recipe {
        let beta = constants.filter(|c| c.source == ConstantsSource::Exact).map(|c| c.beta);
        let applicable = beta.is_some_and(|b| b <= p.beta);
        let l1 = traj.initial_loss();
        let min_grad_norm_sq = traj
            .records
            .iter()
            .take(p.iterations)
            .map(|r| r.grad_norm * r.grad_norm)
            .fold(f64::INFINITY, f64::min);
        analysis.stochastic = Some(StochasticSummary {
            params: p,
            applicable,
            bound: stochastic_bound(&p, l1).ok(),
            bound_raw: stochastic_bound_raw(&p, l1).ok(),
            min_grad_norm_sq,
        });
    }

    analysis.theorem_note = if matches!(setup.problem, Problem::Neurotron { .. }) {
        "not applicable: Neuro-Tron run".to_string()
    } else if cfg.noise.is_some() {
        "not applicable: stochastic run".to_string()
    } else if rule.kind() != StepRuleKind::DeltaGclip {
        "not applicable: rule is not delta-gclip".to_string()
    } else if !cfg.schedule.is_empty() {
        "not applicable: step-size schedule".to_string()
    } else if let Some(c) = constants {
        let (eta, delta) = (rule.eta(), rule.delta());
        analysis.rate_factor_proof = Some(rate_factor_proof(eta, delta, c.mu));
        if eta < 1.0 / c.beta && eta < 1.0 / c.mu {
            analysis.hypotheses_met = true;
            let lambda0 = ntk.map(|s| s.lambda0);
            analysis.theorem = Some(TheoremReport::evaluate(traj, eta, delta, c.mu, c.beta, lambda0)?);
            "evaluated".to_string()
        } else {
            "hypotheses-not-met: eta must be below 1/beta and 1/mu".to_string()
        }
    } else {
        "not applicable: constants unavailable".to_string()
    };
    Ok(analysis)
}

/// Status string used in reports and grid summaries.
pub fn status(t: Termination) -> &'static str {
    match t {
        Termination::MaxIterations => "max_iterations",
        Termination::Converged => "converged",
        Termination::Diverged => "diverged",
    }
}
