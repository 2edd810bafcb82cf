use crate::error::{invalid, Result};
use crate::optimizers::Trajectory;

/// Additive slack on the rate envelope, as a fraction of `L₀`.
pub const ENVELOPE_SLACK: f64 = 1e-12;
/// Additive slack on the trust-ball radius.
pub const BALL_SLACK: f64 = 1e-12;
/// Points at or below this loss are left out of the empirical PL* estimate.
pub const PL_LOSS_FLOOR: f64 = 1e-15;

/// Checks `L_t ≤ L₀(1 − ½ηδμ)ᵗ + 1e-12·L₀` at every record.
///
/// Returns the verdict and the worst excess `(L_t − L₀ρᵗ)/L₀`, floored at 0.
pub fn envelope_check(traj: &Trajectory, eta: f64, delta: f64, mu: f64) -> (bool, f64) {
    let Some(first) = traj.records.first() else {
        return (true, 0.0);
    };
    let l0 = first.loss;
    let rho = (1.0 - 0.5 * eta * delta * mu).max(0.0);
    let mut envelope = l0;
    let mut ok = true;
    let mut worst = 0.0f64;
    for (t, r) in traj.records.iter().enumerate() {
        if t > 0 {
            envelope *= rho;
        }
        if r.loss > envelope + ENVELOPE_SLACK * l0 {
            ok = false;
        }
        if l0 > 0.0 {
            worst = worst.max((r.loss - envelope) / l0);
        } else if r.loss > 0.0 {
            worst = f64::INFINITY;
        }
    }
    (ok, worst)
}

/// True iff every recorded `‖w_t − w₀‖ ≤ R + 1e-12`.
pub fn ball_check(traj: &Trajectory, radius: f64) -> bool {
    traj.records.iter().all(|r| r.dist_from_init <= radius + BALL_SLACK)
}

/// Per-step sufficient decrease `L_{t+1} − L_t ≤ −(h_t/2)‖∇L(w_t)‖²`.
///
/// Returns the verdict and the worst excess relative to `max(L_t, 1)`.
pub fn descent_check(traj: &Trajectory) -> (bool, f64) {
    let mut worst = 0.0f64;
    for pair in traj.records.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let bound = a.loss - 0.5 * a.step_size * a.grad_norm * a.grad_norm;
        let scale = a.loss.max(1.0);
        worst = worst.max((b.loss - bound) / scale);
    }
    (worst <= 1e-12, worst)
}

/// `‖∇L(w_t)‖ ≤ √(2β·L(w_t))` at every record, with 1e-9 slack.
pub fn gradient_bound_check(traj: &Trajectory, beta: f64) -> (bool, f64) {
    let mut worst = 0.0f64;
    for r in &traj.records {
        let bound = (2.0 * beta * r.loss).sqrt();
        worst = worst.max((r.grad_norm - bound) / bound.max(1.0));
    }
    (worst <= 1e-9, worst)
}

/// `inf ‖∇L‖²/L` over the given `(loss, grad_norm)` points, skipping losses
/// at or below [`PL_LOSS_FLOOR`]: the largest μ for which the visited points
/// satisfy μ-PL*.
pub fn empirical_pl(points: &[(f64, f64)]) -> Result<f64> {
    let mut best: Option<f64> = None;
    for &(loss, grad_norm) in points {
        if loss <= PL_LOSS_FLOOR {
            continue;
        }
        let ratio = grad_norm * grad_norm / loss;
        best = Some(best.map_or(ratio, |b| b.min(ratio)));
    }
    best.ok_or_else(|| invalid("empirical PL* needs at least one point with positive loss"))
}
