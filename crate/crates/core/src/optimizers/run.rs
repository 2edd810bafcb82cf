use crate::error::{check_dim, invalid, Result};
use crate::objectives::Objective;
use crate::optimizers::{NoiseOracle, Schedule, StepRule, StepRuleKind};
use crate::optimizers::{Termination, Trajectory, TrajectoryRecord};
use crate::tensor::Vector;

pub const DEFAULT_STOP_TOL: f64 = 1e-12;

/// One applied update `next = w − step_size · direction`.
#[derive(Debug)]
pub struct Step<'a> {
    pub t: usize,
    pub w: &'a Vector,
    pub direction: &'a Vector,
    pub step_size: f64,
    pub next: &'a Vector,
}

fn apply_update(w: &Vector, h: f64, g: &Vector) -> Vector {
    Vector::from_vec(w.iter().zip(g.iter()).map(|(wi, gi)| wi - h * gi).collect())
}

fn finite_eval(obj: &dyn Objective, w: &Vector) -> Option<(f64, Vector)> {
    let (l, g) = obj.value_and_gradient(w);
    (l.is_finite() && g.is_finite()).then_some((l, g))
}

fn check_start(obj: &dyn Objective, w0: &Vector) -> Result<(f64, Vector)> {
    check_dim(obj.dim(), w0.dim())?;
    if !w0.is_finite() {
        return Err(invalid("starting point has non-finite entries"));
    }
    finite_eval(obj, w0).ok_or_else(|| invalid("loss or gradient is non-finite at the starting point"))
}

/// Full-gradient iteration `w_{t+1} = w_t − h(w_t)·∇L(w_t)` for up to `iterations`
/// steps, stopping early once `‖∇L‖ ≤ stop_tol`.
pub fn run_deterministic(
    obj: &dyn Objective,
    rule: &StepRule,
    schedule: &Schedule,
    w0: &Vector,
    iterations: usize,
    stop_tol: f64,
) -> Result<Trajectory> {
    run_deterministic_observed(obj, rule, schedule, w0, iterations, stop_tol, |_| {})
}

/// [`run_deterministic`] with a callback invoked after every applied update.
pub fn run_deterministic_observed(
    obj: &dyn Objective,
    rule: &StepRule,
    schedule: &Schedule,
    w0: &Vector,
    iterations: usize,
    stop_tol: f64,
    mut observe: impl FnMut(&Step<'_>),
) -> Result<Trajectory> {
    let (mut loss, mut grad) = check_start(obj, w0)?;
    let mut rule = *rule;
    let mut w = w0.clone();
    let mut records = Vec::with_capacity(iterations.min(1 << 20) + 1);
    let mut t = 0;
    let termination = loop {
        if let Some(d) = schedule.divisor_at(t) {
            rule = rule.with_eta(rule.eta() / d)?;
        }
        let grad_norm = grad.l2_norm();
        let h = rule.step_size(grad_norm);
        records.push(TrajectoryRecord {
            t,
            loss,
            grad_norm,
            step_size: h,
            dist_from_init: w.distance(w0),
        });
        if grad_norm <= stop_tol {
            break Termination::Converged;
        }
        if t == iterations {
            break Termination::MaxIterations;
        }
        let next = apply_update(&w, h, &grad);
        let Some((l, g)) = finite_eval(obj, &next) else {
            break Termination::Diverged;
        };
        observe(&Step { t, w: &w, direction: &grad, step_size: h, next: &next });
        w = next;
        loss = l;
        grad = g;
        t += 1;
    };
    Ok(Trajectory { records, final_weights: w, termination })
}

/// Stochastic δ-GClip: `w_{t+1} = w_t − h(g_t)·g_t` with `g_t` drawn from the
/// oracle. Records carry the true loss and true gradient norm; the step size
/// column is the one computed from the noisy `‖g_t‖`.
pub fn run_stochastic(
    obj: &dyn Objective,
    rule: &StepRule,
    schedule: &Schedule,
    oracle: &mut NoiseOracle,
    w0: &Vector,
    iterations: usize,
) -> Result<Trajectory> {
    if rule.kind() != StepRuleKind::DeltaGclip {
        return Err(invalid("stochastic runs use the delta-gclip rule"));
    }
    let (mut loss, mut grad) = check_start(obj, w0)?;
    let mut rule = *rule;
    let mut w = w0.clone();
    let mut records = Vec::with_capacity(iterations.min(1 << 20) + 1);
    let mut t = 0;
    let termination = loop {
        if let Some(d) = schedule.divisor_at(t) {
            rule = rule.with_eta(rule.eta() / d)?;
        }
        let g = oracle.perturb(&grad);
        let h = rule.step_size(g.l2_norm());
        records.push(TrajectoryRecord {
            t,
            loss,
            grad_norm: grad.l2_norm(),
            step_size: h,
            dist_from_init: w.distance(w0),
        });
        if t == iterations {
            break Termination::MaxIterations;
        }
        let next = apply_update(&w, h, &g);
        let Some((l, gr)) = finite_eval(obj, &next) else {
            break Termination::Diverged;
        };
        w = next;
        loss = l;
        grad = gr;
        t += 1;
    };
    Ok(Trajectory { records, final_weights: w, termination })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::QuadraticObjective;
    use crate::rng::RngStream;

    #[test]
    fn identity_quadratic_halves_each_step() {
        let q = QuadraticObjective::from_diag(&[1.0, 1.0]).unwrap();
        let rule = StepRule::delta_gclip(0.5, 10.0, 0.5).unwrap();
        let w0 = Vector::from_vec(vec![1.0, 0.0]);
        let mut iterates = vec![w0.clone()];
        let tr = run_deterministic_observed(&q, &rule, &Schedule::none(), &w0, 20, 0.0, |s| {
            iterates.push(s.next.clone())
        })
        .unwrap();
        assert_eq!(tr.records.len(), 21);
        for (t, (w, r)) in iterates.iter().zip(&tr.records).enumerate() {
            assert_eq!(w[0], 0.5f64.powi(t as i32));
            assert_eq!(r.loss, 0.5 * 0.25f64.powi(t as i32));
            assert_eq!(r.step_size, 0.5);
        }
    }

    #[test]
    fn start_at_minimizer_stops_immediately() {
        let q = QuadraticObjective::from_diag(&[1.0, 10.0]).unwrap();
        let rule = StepRule::delta_gclip(0.05, 1.0, 0.5).unwrap();
        let tr = run_deterministic(&q, &rule, &Schedule::none(), &Vector::zeros(2), 100, 1e-12).unwrap();
        assert_eq!(tr.records.len(), 1);
        assert_eq!(tr.termination, Termination::Converged);
    }

    #[test]
    fn divergence_is_a_termination_reason() {
        let q = QuadraticObjective::from_diag(&[1.0, 10.0]).unwrap();
        // η·β = 30 ≫ 2: every step multiplies the second coordinate by −29.
        let rule = StepRule::constant(3.0).unwrap();
        let w0 = Vector::from_vec(vec![1.0, 1.0]);
        let tr = run_deterministic(&q, &rule, &Schedule::none(), &w0, 10_000, 0.0).unwrap();
        assert_eq!(tr.termination, Termination::Diverged);
        assert!(tr.records.len() < 10_000);
        assert!(tr.records.iter().all(|r| r.loss.is_finite()));
        assert!(tr.final_weights.is_finite());
    }

    #[test]
    fn rejects_bad_start() {
        let q = QuadraticObjective::from_diag(&[1.0, 10.0]).unwrap();
        let rule = StepRule::constant(0.01).unwrap();
        assert!(run_deterministic(&q, &rule, &Schedule::none(), &Vector::zeros(3), 1, 0.0).is_err());
        let nan = Vector::from_vec(vec![f64::NAN, 0.0]);
        assert!(run_deterministic(&q, &rule, &Schedule::none(), &nan, 1, 0.0).is_err());
    }

    #[test]
    fn schedule_divides_eta() {
        let q = QuadraticObjective::from_diag(&[1.0]).unwrap();
        let rule = StepRule::constant(0.1).unwrap();
        let s = Schedule::new(vec![(2, 10.0), (4, 10.0)]).unwrap();
        let tr = run_deterministic(&q, &rule, &s, &Vector::from_vec(vec![1.0]), 5, 0.0).unwrap();
        let h: Vec<f64> = tr.records.iter().map(|r| r.step_size).collect();
        assert_eq!(h[0], 0.1);
        assert_eq!(h[1], 0.1);
        assert_eq!(h[2], 0.1 / 10.0);
        assert_eq!(h[4], 0.1 / 10.0 / 10.0);
    }

    #[test]
    fn stochastic_requires_delta_gclip() {
        let q = QuadraticObjective::from_diag(&[1.0]).unwrap();
        let mut o = NoiseOracle::new(0.1, RngStream::new(0, 0)).unwrap();
        let rule = StepRule::gclip(0.1, 1.0).unwrap();
        let w0 = Vector::from_vec(vec![1.0]);
        assert!(run_stochastic(&q, &rule, &Schedule::none(), &mut o, &w0, 5).is_err());
    }

    #[test]
    fn stochastic_runs_are_reproducible() {
        let q = QuadraticObjective::from_diag(&[0.5, 1.0]).unwrap();
        let rule = StepRule::delta_gclip(0.05, 1.0, 6.0 / 7.0).unwrap();
        let w0 = Vector::from_vec(vec![2.0, -1.0]);
        let run = || {
            let mut o = NoiseOracle::new(1.0, RngStream::new(17, 3)).unwrap();
            run_stochastic(&q, &rule, &Schedule::none(), &mut o, &w0, 50).unwrap()
        };
        let (a, b) = (run(), run());
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.loss.to_bits(), y.loss.to_bits());
            assert_eq!(x.step_size.to_bits(), y.step_size.to_bits());
        }
    }
}
