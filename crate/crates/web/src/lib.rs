//! Browser bindings for the interactive demo page in `www/`.
//!
//! Each operation is a plain Rust function returning flat `f64` buffers, with
//! a thin `wasm_bindgen` wrapper that turns errors into JS exceptions.

use deltaclip_core::analysis::{empirical_pl, ntk_summary, pl_radius, rate_factor};
use deltaclip_core::objectives::{Activation, MlpArch};
use deltaclip_core::optimizers::run_deterministic;
use deltaclip_core::{
    Dataset, MlpObjective, NoiseOracle, Objective, QuadraticObjective, RngStream, Schedule, StepRule,
};
use wasm_bindgen::prelude::*;

/// Columns per iterate in [`quadratic_path`]: x, y, loss, step size, envelope.
pub const PATH_COLUMNS: usize = 5;
/// Largest iteration count the page may request.
pub const MAX_STEPS: usize = 100_000;
const NET_INPUT_DIM: usize = 8;

/// `n` log-spaced gradient norms in `[lo, hi]` with the GClip and δ-GClip step
/// sizes at each, as rows `(‖g‖, h_gclip, h_delta)`.
pub fn step_size_curve(eta: f64, gamma: f64, delta: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, String> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err("need 0 < lo < hi and at least two points".into());
    }
    let gclip = StepRule::gclip(eta, gamma).map_err(|e| e.to_string())?;
    let dclip = StepRule::delta_gclip(eta, gamma, delta).map_err(|e| e.to_string())?;
    let (a, b) = (lo.ln(), hi.ln());
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        let g = (a + (b - a) * i as f64 / (n - 1) as f64).exp();
        out.extend([g, gclip.step_size(g), dclip.step_size(g)]);
    }
    Ok(out)
}

/// Iterates of δ-GClip on `½(λ₁x² + λ₂y²)` from `(x0, y0)`, optionally with
/// additive gradient noise of magnitude `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticPath {
    /// Rows of [`PATH_COLUMNS`]; the envelope column is NaN when the rate
    /// hypotheses `η < 1/β, η < 1/μ` fail or the run is stochastic.
    pub rows: Vec<f64>,
    /// Trust radius around the start, or NaN when not applicable.
    pub radius: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn quadratic_path(
    diag: [f64; 2],
    start: [f64; 2],
    eta: f64,
    gamma: f64,
    delta: f64,
    theta: f64,
    steps: usize,
    seed: u64,
) -> Result<QuadraticPath, String> {
    if steps > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps"));
    }
    let obj = QuadraticObjective::from_diag(&diag).map_err(|e| e.to_string())?;
    let rule = StepRule::delta_gclip(eta, gamma, delta).map_err(|e| e.to_string())?;
    let mut oracle = NoiseOracle::new(theta, RngStream::new(seed, 1)).map_err(|e| e.to_string())?;
    let c = obj.constants();
    let mut w = deltaclip_core::Vector::from_vec(start.to_vec());
    let l0 = obj.value(&w);
    let theory = theta == 0.0 && eta < 1.0 / c.beta && eta < 1.0 / c.mu;
    let rate = rate_factor(eta, delta, c.mu);
    let radius = if theory { pl_radius(eta, c.beta, delta, c.mu, l0).map_err(|e| e.to_string())? } else { f64::NAN };
    let mut rows = Vec::with_capacity(PATH_COLUMNS * (steps + 1));
    for t in 0..=steps {
        let (loss, grad) = obj.value_and_gradient(&w);
        if !loss.is_finite() {
            break;
        }
        let g = oracle.perturb(&grad);
        let h = rule.step_size(g.l2_norm());
        let envelope = if theory { l0 * rate.powi(t as i32) } else { f64::NAN };
        rows.extend([w[0], w[1], loss, h, envelope]);
        if t < steps {
            w.axpy(-h, &g);
        }
    }
    Ok(QuadraticPath { rows, radius })
}

/// Loss curve of δ-GClip on a one-hidden-layer tanh network fitting random
/// targets, with the tangent-kernel spectrum at the start.
#[derive(Debug, Clone, PartialEq)]
pub struct NetRun {
    pub losses: Vec<f64>,
    pub lambda0: f64,
    /// `inf ‖∇L‖²/L` along the run.
    pub empirical_pl: f64,
    pub diverged: bool,
}

pub fn wide_net(
    width: usize,
    samples: usize,
    eta: f64,
    gamma: f64,
    delta: f64,
    iterations: usize,
    seed: u64,
) -> Result<NetRun, String> {
    if iterations > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} iterations"));
    }
    let mut rng = RngStream::new(seed, 0);
    let arch = MlpArch::new(vec![NET_INPUT_DIM, width, 1], Activation::Tanh, Activation::Identity)
        .map_err(|e| e.to_string())?;
    let data = Dataset::random_unit(samples, NET_INPUT_DIM, -1.0, 1.0, &mut rng).map_err(|e| e.to_string())?;
    let w0 = arch.gaussian_weights(&mut rng);
    let obj = MlpObjective::new(arch, data).map_err(|e| e.to_string())?;
    let ntk = ntk_summary(&obj.spec_at(&w0), obj.data()).map_err(|e| e.to_string())?;
    let rule = StepRule::delta_gclip(eta, gamma, delta).map_err(|e| e.to_string())?;
    let traj = run_deterministic(&obj, &rule, &Schedule::none(), &w0, iterations, 1e-12).map_err(|e| e.to_string())?;
    Ok(NetRun {
        losses: traj.records.iter().map(|r| r.loss).collect(),
        lambda0: ntk.lambda0,
        empirical_pl: empirical_pl(&traj.loss_grad_points()).unwrap_or(f64::NAN),
        diverged: traj.diverged(),
    })
}

#[wasm_bindgen(js_name = stepSizeCurve)]
pub fn step_size_curve_js(eta: f64, gamma: f64, delta: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    step_size_curve(eta, gamma, delta, lo, hi, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = QuadraticPath)]
pub struct QuadraticPathJs(QuadraticPath);

#[wasm_bindgen(js_class = QuadraticPath)]
impl QuadraticPathJs {
    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> Vec<f64> {
        self.0.rows.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn radius(&self) -> f64 {
        self.0.radius
    }

    #[wasm_bindgen(getter)]
    pub fn columns(&self) -> usize {
        PATH_COLUMNS
    }
}

#[wasm_bindgen(js_name = quadraticPath)]
#[allow(clippy::too_many_arguments)]
pub fn quadratic_path_js(
    lambda1: f64,
    lambda2: f64,
    x0: f64,
    y0: f64,
    eta: f64,
    gamma: f64,
    delta: f64,
    theta: f64,
    steps: usize,
    seed: u64,
) -> Result<QuadraticPathJs, JsError> {
    quadratic_path([lambda1, lambda2], [x0, y0], eta, gamma, delta, theta, steps, seed)
        .map(QuadraticPathJs)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = NetRun)]
pub struct NetRunJs(NetRun);

#[wasm_bindgen(js_class = NetRun)]
impl NetRunJs {
    #[wasm_bindgen(getter)]
    pub fn losses(&self) -> Vec<f64> {
        self.0.losses.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn lambda0(&self) -> f64 {
        self.0.lambda0
    }

    #[wasm_bindgen(getter, js_name = empiricalPl)]
    pub fn empirical_pl(&self) -> f64 {
        self.0.empirical_pl
    }

    #[wasm_bindgen(getter)]
    pub fn diverged(&self) -> bool {
        self.0.diverged
    }
}

#[wasm_bindgen(js_name = wideNet)]
pub fn wide_net_js(
    width: usize,
    samples: usize,
    eta: f64,
    gamma: f64,
    delta: f64,
    iterations: usize,
    seed: u64,
) -> Result<NetRunJs, JsError> {
    wide_net(width, samples, eta, gamma, delta, iterations, seed).map(NetRunJs).map_err(|e| JsError::new(&e))
}
