//! Acceptance suite: one PASS/FAIL line per criterion, with tolerances and
//! runtime budgets pinned. Exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use deltaclip_cli::harness::execute;
use deltaclip_cli::output::sha256_file;
use deltaclip_cli::ExperimentConfig;
use deltaclip_core::analysis::{gradcheck, stochastic_bound, stochastic_params, TheoremReport};
use deltaclip_core::objectives::{Activation, MlpArch};
use deltaclip_core::optimizers::{neurotron_run, run_deterministic, run_stochastic, NeurotronProblem};
use deltaclip_core::tensor::gaussian_matrix;
use deltaclip_core::{
    Dataset, Matrix, MlpObjective, NoiseOracle, Objective, QuadraticObjective, RngStream, Schedule,
    StepRule, Termination, Vector,
};

/// Name, runtime budget and check.
type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&examples().join(name)).expect("shipped config loads")
}

// 1. ηδ ≤ h ≤ η for random rules and norms, zero tolerance.
fn sandwich() -> Outcome {
    let mut rng = RngStream::new(2024, 1);
    let draws = 100_000;
    let mut violations = 0;
    for i in 0..draws {
        let eta = rng.log_uniform(1e-6, 1e2);
        let gamma = rng.log_uniform(1e-6, 1e6);
        let delta = rng.log_uniform(1e-12, 1.0).min(0.999_999);
        let g = if i % 100 == 0 { 0.0 } else { rng.log_uniform(1e-12, 1e12) };
        let rule = StepRule::delta_gclip(eta, gamma, delta).unwrap();
        let h = rule.step_size(g);
        if !(eta * delta <= h && h <= eta) {
            violations += 1;
        }
    }
    Outcome { pass: violations == 0, detail: format!("{draws} draws, {violations} violations (tolerance 0)") }
}

// 2. With γ = 0.25, δ = 1e-3 the floor engages exactly from ‖g‖ = 250 on.
fn clip_threshold() -> Outcome {
    let rule = StepRule::delta_gclip(1.0, 0.25, 1e-3).unwrap();
    let floor = rule.eta() * rule.delta();
    let at_floor = |g: f64| rule.step_size(g) == floor;
    // Smallest positive double g with h(g) = ηδ, by bisection on bit patterns.
    let (mut lo, mut hi) = (1.0_f64.to_bits(), 1e6_f64.to_bits());
    assert!(!at_floor(f64::from_bits(lo)) && at_floor(f64::from_bits(hi)));
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if at_floor(f64::from_bits(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let boundary = f64::from_bits(hi);
    let ulps = hi.abs_diff(250.0_f64.to_bits());
    let mut rng = RngStream::new(7, 2);
    let mut wrong = 0;
    for _ in 0..10_000 {
        let above = rng.log_uniform(250.0, 1e300);
        let below = rng.uniform_range(0.0, 250.0);
        wrong += usize::from(!at_floor(above)) + usize::from(rule.step_size(below) <= floor);
    }
    wrong += usize::from(!at_floor(250.0));
    Outcome {
        pass: ulps <= 1 && wrong == 0,
        detail: format!("boundary {boundary:?} is {ulps} ULP from 250 (tolerance 1); {wrong} misclassified probes"),
    }
}

// 3. Envelope and trust ball on diag(1, 10) from 20 random starts.
fn envelope() -> Outcome {
    let obj = QuadraticObjective::from_diag(&[1.0, 10.0]).unwrap();
    let c = obj.constants();
    let (eta, delta) = (0.09, 0.5);
    assert!(eta < (1.0 / c.beta).min(1.0 / c.mu));
    let rule = StepRule::delta_gclip(eta, 1.0, delta).unwrap();
    let mut failures = 0;
    let mut worst = 0.0_f64;
    let mut closest = f64::INFINITY;
    for seed in 0..20 {
        let mut rng = RngStream::new(seed, 3);
        let w0 = Vector::gaussian(2, &mut rng).scaled(5.0);
        let tr = run_deterministic(&obj, &rule, &Schedule::none(), &w0, 500, 0.0).unwrap();
        let r = TheoremReport::evaluate(&tr, eta, delta, c.mu, c.beta, None).unwrap();
        worst = worst.max(r.max_envelope_violation);
        closest = closest.min(r.radius_r - tr.max_dist_from_init());
        failures += usize::from(!(r.envelope_ok && r.radius_ok && tr.records.len() == 501));
    }
    Outcome {
        pass: failures == 0,
        detail: format!(
            "20 starts, T=500: worst envelope excess {worst:e}·L0 (slack 1e-12·L0), min radius margin {closest:.3}"
        ),
    }
}

// 4. Wide tanh net driven to zero loss by the shipped config.
fn wide_net() -> Outcome {
    let base = load("widenet_pl.cfg");
    let mut reached = 0;
    let mut kernel_ok = 0;
    let mut pl_ok = 0;
    let mut lambdas = Vec::new();
    for seed in 0..10 {
        let cfg = ExperimentConfig { seed, ..base.clone() };
        let exec = execute(&cfg).expect("wide-net run");
        let t = &exec.trajectory;
        if t.final_loss() <= 1e-6 && t.iterations() <= 50_000 && t.termination != Termination::Diverged {
            reached += 1;
        }
        let ntk = exec.analysis.ntk.expect("network run has a kernel");
        lambdas.push(ntk.lambda0);
        kernel_ok += usize::from(ntk.lambda0 > 0.0);
        let cand = ntk.mu_candidate.expect("identity output has rho = 1");
        pl_ok += usize::from(exec.analysis.empirical_pl.is_some_and(|pl| pl >= 0.5 * cand));
    }
    let lmin = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome {
        pass: reached >= 9 && kernel_ok == 10 && pl_ok == 10,
        detail: format!(
            "loss ≤ 1e-6 within 5e4 iterations on {reached}/10 seeds (need 9); λ0 > 0 on {kernel_ok}/10 (min {lmin:.4}); \
             empirical PL ≥ ½λ0ρ² on {pl_ok}/10"
        ),
    }
}

// 5. Stochastic recipe values and the Monte-Carlo bound check.
fn stochastic() -> Outcome {
    let p = stochastic_params(0.5, 1.0).unwrap();
    // ε′² = 1/4: δ = (3/2)/(7/4) = 6/7, η = (1/16)/(5/4) = 1/20, T = 16.
    let exact = p.delta == 6.0 / 7.0 && p.eta == 1.0 / 20.0 && p.iterations == 16;
    let obj = QuadraticObjective::from_diag(&[0.5, 1.0]).unwrap();
    let beta_ok = obj.constants().beta <= 1.0;
    let rule = StepRule::delta_gclip(p.eta, 1.0, p.delta).unwrap();
    let w1 = Vector::from_vec(vec![1.0, -1.0]);
    let bound = stochastic_bound(&p, obj.value(&w1)).unwrap();
    let seeds = 100;
    let mut sq = vec![vec![0.0; seeds]; p.iterations];
    for s in 0..seeds {
        let mut oracle = NoiseOracle::new(p.theta, RngStream::new(s as u64, 5)).unwrap();
        let tr = run_stochastic(&obj, &rule, &Schedule::none(), &mut oracle, &w1, p.iterations).unwrap();
        for (t, r) in tr.records.iter().take(p.iterations).enumerate() {
            sq[t][s] = r.grad_norm * r.grad_norm;
        }
    }
    let (mean, se) = sq
        .iter()
        .map(|xs| {
            let n = xs.len() as f64;
            let m = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
            (m, (var / n).sqrt())
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    Outcome {
        pass: exact && beta_ok && mean <= bound + 3.0 * se,
        detail: format!(
            "δ={:?} η={:?} T={} (exact: {exact}); min_t E‖∇L‖² = {mean:.4} ± {se:.4} vs bound {bound:.4} (+3 SE)",
            p.delta, p.eta, p.iterations
        ),
    }
}

// 6. θ = 0 reduces to the deterministic run; δ = 1e-300 reduces to GClip.
fn reductions() -> Outcome {
    let obj = QuadraticObjective::from_diag(&[1.0, 10.0]).unwrap();
    let w0 = Vector::from_vec(vec![300.0, -200.0]);
    let rule = StepRule::delta_gclip(0.09, 1.0, 0.5).unwrap();
    let det = run_deterministic(&obj, &rule, &Schedule::none(), &w0, 1000, 0.0).unwrap();
    let mut oracle = NoiseOracle::new(0.0, RngStream::new(9, 9)).unwrap();
    let sto = run_stochastic(&obj, &rule, &Schedule::none(), &mut oracle, &w0, 1000).unwrap();
    let noise_free = sto.records == det.records && sto.final_weights == det.final_weights;

    let tiny = StepRule::delta_gclip(0.09, 1.0, 1e-300).unwrap();
    let clip = StepRule::gclip(0.09, 1.0).unwrap();
    let a = run_deterministic(&obj, &tiny, &Schedule::none(), &w0, 1000, 0.0).unwrap();
    let b = run_deterministic(&obj, &clip, &Schedule::none(), &w0, 1000, 0.0).unwrap();
    let bits = |t: &deltaclip_core::Trajectory| -> Vec<u64> {
        t.records.iter().flat_map(|r| [r.loss.to_bits(), r.step_size.to_bits(), r.grad_norm.to_bits()]).collect()
    };
    let same = a.records.len() == 1001 && bits(&a) == bits(&b) && a.final_weights == b.final_weights;
    let clipped = a.records.iter().filter(|r| r.step_size < 0.09).count();
    Outcome {
        pass: noise_free && same && clipped > 0,
        detail: format!(
            "θ=0 iterate-identical: {noise_free}; δ=1e-300 vs GClip bit-identical over 1000 steps: {same} ({clipped} clipped steps)"
        ),
    }
}

/// `BᵀB/dim + 0.1·I`, spectrum of order one.
fn random_spd(dim: usize, rng: &mut RngStream) -> Matrix {
    let b = gaussian_matrix(dim, dim, rng).unwrap();
    let mut a = b.transpose().matmul(&b).unwrap();
    a.data_mut().iter_mut().for_each(|x| *x /= dim as f64);
    for i in 0..dim {
        a.set(i, i, a.get(i, i) + 0.1);
    }
    // Symmetrize exactly; the product is symmetric only up to rounding.
    let at = a.transpose();
    Matrix::new(dim, dim, a.data().iter().zip(at.data()).map(|(x, y)| 0.5 * (x + y)).collect()).unwrap()
}

// 7. Analytic gradients against central differences.
fn gradients() -> Outcome {
    let mut rng = RngStream::new(77, 4);
    let acts = [Activation::Tanh, Activation::Relu, Activation::Identity];
    let mut worst_mlp = 0.0_f64;
    for i in 0..20 {
        let depth = 1 + i % 3;
        let mut widths = vec![1 + (rng.uniform() * 8.0) as usize];
        for _ in 0..depth {
            widths.push(1 + (rng.uniform() * 64.0) as usize);
        }
        widths.push(1);
        let hidden = acts[i % 2];
        let output = if i % 4 == 3 { Activation::Tanh } else { Activation::Identity };
        let arch = MlpArch::new(widths.clone(), hidden, output).unwrap();
        let n = 1 + (rng.uniform() * 8.0) as usize;
        let data = Dataset::random_unit(n, widths[0], -1.0, 1.0, &mut rng).unwrap();
        let w = arch.gaussian_weights(&mut rng);
        let obj = MlpObjective::new(arch, data).unwrap();
        worst_mlp = worst_mlp.max(gradcheck(&obj, &w));
    }
    // Central differences carry a rounding floor of about ε·L(w)/h, so the
    // quadratic instances are kept at unit scale.
    let mut quads = vec![
        (QuadraticObjective::from_diag(&[1.0, 1.0]).unwrap(), Vector::from_vec(vec![1.0, 0.0])),
        (QuadraticObjective::from_diag(&[1.0, 10.0]).unwrap(), Vector::from_vec(vec![1.0, -1.0])),
    ];
    let shipped = load("quadratic_theorem2.cfg");
    let setup = deltaclip_cli::problem::build(&shipped).unwrap();
    if let deltaclip_cli::problem::Problem::Quadratic(q) = setup.problem {
        quads.push((q, setup.w0));
    }
    for dim in [1, 2, 3, 4, 5] {
        let q = QuadraticObjective::new(random_spd(dim, &mut rng)).unwrap();
        quads.push((q, Vector::gaussian(dim, &mut rng)));
    }
    let worst_quad = quads.iter().map(|(q, w)| gradcheck(q, w)).fold(0.0_f64, f64::max);
    Outcome {
        pass: worst_mlp <= 1e-5 && worst_quad <= 1e-9,
        detail: format!(
            "20 MLPs (1-3 hidden layers, widths ≤ 64): worst {worst_mlp:e} (tol 1e-5); {} unit-scale quadratics: worst {worst_quad:e} (tol 1e-9)",
            quads.len()
        ),
    }
}

// 8. Neuro-Tron recovers the filter; the teacher is a fixed point.
fn neurotron() -> Outcome {
    let base = load("neurotron.cfg");
    let mut reached = 0;
    for seed in 0..10 {
        let exec = execute(&ExperimentConfig { seed, ..base.clone() }).expect("neurotron run");
        if exec.trajectory.records.iter().any(|r| r.loss <= 1e-3) {
            reached += 1;
        }
    }
    let mut rng = RngStream::new(3, 0);
    let w_star = Vector::gaussian(8, &mut rng);
    let p = NeurotronProblem::identity(w_star.clone(), 0.0, 0.0).unwrap();
    let tr = neurotron_run(&p, &w_star, 1000, 16, 0.1, &mut rng).unwrap();
    let fixed = tr.final_weights == w_star && tr.records.iter().all(|r| r.grad_norm == 0.0);
    Outcome {
        pass: reached >= 9 && fixed,
        detail: format!("‖w−w*‖ ≤ 1e-3 within 1e4 iterations on {reached}/10 seeds (need 9); w1 = w* fixed: {fixed}"),
    }
}

// 9. Every shipped config reproduces its traces byte for byte.
fn determinism() -> Outcome {
    let tmp = std::env::temp_dir().join(format!("deltaclip-acceptance-{}", std::process::id()));
    let mut configs: Vec<PathBuf> = std::fs::read_dir(examples())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
        .collect();
    configs.sort();
    let mut mismatches = Vec::new();
    let mut traces = 0;
    for cfg in &configs {
        let stem = cfg.file_stem().unwrap().to_string_lossy().into_owned();
        let mut cmds = vec!["run"];
        if load(&format!("{stem}.cfg")).grid.is_some() {
            cmds.push("grid");
        }
        for cmd in cmds {
            let mut hashes = Vec::new();
            for rep in 0..2 {
                let out = tmp.join(format!("{stem}-{cmd}-{rep}"));
                let status = Command::new(env!("CARGO_BIN_EXE_deltaclip"))
                    .args([cmd, "--jobs", "4"])
                    .arg(cfg)
                    .arg("--out")
                    .arg(&out)
                    .env_remove("DELTACLIP_OUT")
                    .status()
                    .unwrap();
                assert!(status.success(), "{stem} {cmd}");
                let mut files = vec![out.join("trace.csv")];
                if cmd == "grid" {
                    files = std::fs::read_dir(&out)
                        .unwrap()
                        .map(|e| e.unwrap().path())
                        .filter(|p| p.is_dir())
                        .map(|p| p.join("trace.csv"))
                        .collect();
                    files.sort();
                }
                hashes.push(files.iter().map(|f| sha256_file(f).unwrap()).collect::<Vec<_>>());
            }
            traces += hashes[0].len();
            if hashes[0] != hashes[1] {
                mismatches.push(format!("{stem}/{cmd}"));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&tmp);
    Outcome {
        pass: mismatches.is_empty() && !configs.is_empty(),
        detail: format!(
            "{} configs, {traces} trace files hashed twice with SHA-256; mismatches: {mismatches:?}",
            configs.len()
        ),
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("step-size sandwich", Duration::from_secs(1), sandwich),
        ("clipping threshold at 250", Duration::from_secs(1), clip_threshold),
        ("envelope and trust radius on diag(1,10)", Duration::from_secs(5), envelope),
        ("wide-net zero loss", Duration::from_secs(300), wide_net),
        ("stochastic recipe and bound", Duration::from_secs(30), stochastic),
        ("reductions", Duration::from_secs(1), reductions),
        ("gradient correctness", Duration::from_secs(30), gradients),
        ("Neuro-Tron recovery", Duration::from_secs(30), neurotron),
        ("determinism of shipped configs", Duration::from_secs(60), determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed < *budget;
        failed += usize::from(!pass);
        println!(
            "{} {} {name}: {} [{:.2}s, budget {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
