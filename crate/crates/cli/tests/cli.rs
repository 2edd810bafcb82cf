use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use deltaclip_cli::output::sha256_file;
use serde_json::Value;
use tempfile::TempDir;

const QUADRATIC: &str = r#"{
  "version": 1,
  "seed": 4,
  "iterations": 200,
  "objective": { "kind": "quadratic", "diag": [1.0, 10.0] },
  "optimizer": { "kind": "delta-gclip", "eta": 0.09, "gamma": 1.0, "delta": 0.5 },
  "init": { "kind": "gaussian", "scale": 5.0 }
}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_deltaclip"));
    c.env_remove("DELTACLIP_OUT");
    c
}

fn write_cfg(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    bin().args(args).arg(cfg).arg("--out").arg(out).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn examples_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

#[test]
fn zero_iterations_give_one_data_row() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(tmp.path(), "q.cfg", &QUADRATIC.replace("\"iterations\": 200", "\"iterations\": 0"));
    let out = tmp.path().join("out");
    let o = run(&["run"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "t,loss,grad_norm,step_size,dist_from_init");
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn run_writes_all_artifacts_with_exact_report_fields() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(tmp.path(), "q.cfg", QUADRATIC);
    let out = tmp.path().join("out");
    assert_eq!(code(&run(&["run"], &cfg, &out)), 0);
    for f in ["trace.csv", "report.json", "config.json", "plot.gp"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let report = json(&out.join("report.json"));
    let theorem = report["analysis"]["theorem"].as_object().unwrap();
    let mut keys: Vec<&str> = theorem.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["beta", "envelope_ok", "lambda0", "max_envelope_violation", "mu", "radius_R", "radius_ok", "rate_factor"]
    );
    assert_eq!(theorem["envelope_ok"], true);
    assert_eq!(theorem["radius_ok"], true);
    assert_eq!(theorem["mu"], 2.0);
    assert_eq!(theorem["beta"], 10.0);
    assert!(theorem["lambda0"].is_null());
    assert_eq!(report["status"], "max_iterations");
    let echoed = json(&out.join("config.json"));
    assert_eq!(echoed["version"], 1);
    assert_eq!(echoed["seed"], 4);
}

#[test]
fn reruns_are_byte_identical_and_seed_flag_overrides() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(tmp.path(), "q.cfg", QUADRATIC);
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    run(&["run"], &cfg, &a);
    run(&["run"], &cfg, &b);
    let o = bin().args(["run", "--seed", "5"]).arg(&cfg).arg("--out").arg(&c).output().unwrap();
    assert_eq!(code(&o), 0);
    let h = |d: &Path| sha256_file(&d.join("trace.csv")).unwrap();
    assert_eq!(h(&a), h(&b));
    assert_ne!(h(&a), h(&c));
    assert_eq!(json(&c.join("config.json"))["seed"], 5);
}

#[test]
fn output_root_comes_from_the_environment() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(tmp.path(), "envtest.cfg", QUADRATIC);
    let root = tmp.path().join("root");
    let o = bin().arg("run").arg(&cfg).env("DELTACLIP_OUT", &root).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(root.join("envtest").join("trace.csv").is_file());
}

#[test]
fn config_errors_exit_with_two_and_point_at_the_problem() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let cases = [
        ("typo.cfg", QUADRATIC.replace("\"seed\": 4", "\"seed\": 4, \"sed\": 1"), "line 3"),
        ("syntax.cfg", QUADRATIC.replace("\"iterations\": 200,", "\"iterations\": 200"), "line 5"),
        ("noseed.cfg", QUADRATIC.replace("\"seed\": 4,", ""), "seed"),
        ("delta.cfg", QUADRATIC.replace("\"delta\": 0.5", "\"delta\": 2.0"), "optimizer"),
        ("spd.cfg", QUADRATIC.replace("[1.0, 10.0]", "[1.0, -1.0]"), "objective"),
        ("csv.cfg", QUADRATIC.replace(
            r#"{ "kind": "quadratic", "diag": [1.0, 10.0] }"#,
            r#"{ "kind": "mlp", "widths": [2, 4, 1], "hidden": "tanh", "output": "identity",
                 "dataset": { "kind": "csv", "path": "missing.csv" } }"#,
        ), "missing.csv"),
    ];
    for (name, text, needle) in cases {
        let cfg = write_cfg(tmp.path(), name, &text);
        for cmd in ["run", "verify", "grid"] {
            let o = run(&[cmd], &cfg, &out);
            let err = String::from_utf8_lossy(&o.stderr);
            assert_eq!(code(&o), 2, "{name} {cmd}: {err}");
            assert!(err.contains(needle), "{name}: {err}");
        }
    }
    let o = bin().arg("run").arg(tmp.path().join("absent.cfg")).output().unwrap();
    assert_eq!(code(&o), 2);
    let o = bin().arg("frobnicate").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn divergence_is_reported_and_exits_zero() {
    let tmp = TempDir::new().unwrap();
    let text = QUADRATIC
        .replace(r#""kind": "delta-gclip", "eta": 0.09, "gamma": 1.0, "delta": 0.5"#, r#""kind": "constant", "eta": 10.0"#)
        .replace("\"iterations\": 200", "\"iterations\": 2000");
    let cfg = write_cfg(tmp.path(), "div.cfg", &text);
    let out = tmp.path().join("out");
    let o = run(&["run"], &cfg, &out);
    assert_eq!(code(&o), 0);
    let report = json(&out.join("report.json"));
    assert_eq!(report["status"], "diverged");
    assert!(report["final_loss"].as_f64().unwrap().is_finite());
}

#[test]
fn verify_skips_theory_checks_outside_the_hypotheses() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(tmp.path(), "big.cfg", &QUADRATIC.replace("\"eta\": 0.09", "\"eta\": 0.15"));
    let out = tmp.path().join("out");
    let o = run(&["verify"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&out.join("verdict.json"));
    let env = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "envelope").unwrap();
    assert_eq!(env["status"], "skipped");
    assert_eq!(env["note"], "hypotheses-not-met, skipped");
}

#[test]
fn verify_fails_on_a_rank_deficient_kernel() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("dup.csv"), "x1,x2,y\n0.5,0.1,1\n0.5,0.1,-1\n-0.3,0.9,0.2\n").unwrap();
    let text = r#"{"version": 1, "seed": 0, "iterations": 50,
        "objective": {"kind": "mlp", "widths": [2, 16, 1], "hidden": "tanh", "output": "identity",
                      "dataset": {"kind": "csv", "path": "dup.csv"}},
        "optimizer": {"kind": "delta-gclip", "eta": 0.5, "gamma": 1, "delta": 0.5}}"#;
    let cfg = write_cfg(tmp.path(), "dup.cfg", text);
    let out = tmp.path().join("out");
    let o = run(&["verify"], &cfg, &out);
    assert_eq!(code(&o), 1);
    let v = json(&out.join("verdict.json"));
    assert_eq!(v["ok"], false);
    let ntk = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "ntk_lambda0").unwrap();
    assert_eq!(ntk["status"], "fail");
}

#[test]
fn shipped_quadratic_config_verifies() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run(&["verify"], &examples_dir().join("quadratic_theorem2.cfg"), &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&out.join("verdict.json"));
    for name in ["gradcheck", "step_size_sandwich", "envelope", "ball", "descent", "gradient_bound"] {
        let c = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap();
        assert_eq!(c["status"], "pass", "{name}");
    }
}

#[test]
fn one_by_one_grid_is_the_single_run() {
    let tmp = TempDir::new().unwrap();
    let text = QUADRATIC.replace("\"iterations\": 200,", "\"iterations\": 200, \"noise\": {\"theta\": 0.5},");
    let single = write_cfg(tmp.path(), "single.cfg", &text);
    let grid = write_cfg(
        tmp.path(),
        "grid.cfg",
        &text.replace("\"iterations\": 200,", "\"iterations\": 200, \"grid\": {\"eta\": [0.09]},"),
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&run(&["run"], &single, &a)), 0);
    assert_eq!(code(&run(&["grid"], &grid, &b)), 0);
    let cell = b.join("eta=0.09_gamma=1.0_delta=0.5");
    assert_eq!(sha256_file(&a.join("trace.csv")).unwrap(), sha256_file(&cell.join("trace.csv")).unwrap());
    let summary = fs::read_to_string(b.join("grid_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
    assert!(summary.lines().nth(1).unwrap().ends_with(",true"));
}

#[test]
fn inactive_delta_gives_equal_losses() {
    let tmp = TempDir::new().unwrap();
    let text = r#"{"version": 1, "seed": 2, "iterations": 300,
        "objective": {"kind": "quadratic", "diag": [0.5, 1.0]},
        "optimizer": {"kind": "delta-gclip", "eta": 0.5, "gamma": 10.0, "delta": 0.5},
        "grid": {"delta": [1e-8, 1e-3]}}"#;
    let cfg = write_cfg(tmp.path(), "mild.cfg", text);
    let out = tmp.path().join("out");
    let o = bin().args(["grid", "--jobs", "2"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(code(&o), 0);
    let mut rdr = csv::Reader::from_path(out.join("grid_summary.csv")).unwrap();
    let losses: Vec<f64> = rdr.records().map(|r| r.unwrap()[7].parse().unwrap()).collect();
    assert_eq!(losses.len(), 2);
    assert!((losses[0] - losses[1]).abs() <= 1e-10, "{losses:?}");
}

#[test]
fn permuted_grid_axes_give_identical_cells() {
    let tmp = TempDir::new().unwrap();
    let base = QUADRATIC.replace("\"iterations\": 200,", "\"iterations\": 100, \"noise\": {\"theta\": 1.0}, GRID");
    let a_cfg = write_cfg(tmp.path(), "a.cfg", &base.replace("GRID", r#""grid": {"eta": [0.01, 0.05, 0.09], "delta": [0.2, 0.5]},"#));
    let b_cfg = write_cfg(tmp.path(), "b.cfg", &base.replace("GRID", r#""grid": {"eta": [0.09, 0.01, 0.05], "delta": [0.5, 0.2]},"#));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&run(&["grid"], &a_cfg, &a)), 0);
    let o = bin().args(["grid", "--jobs", "4"]).arg(&b_cfg).arg("--out").arg(&b).output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(a.join("grid_summary.csv")).unwrap(), fs::read(b.join("grid_summary.csv")).unwrap());
    let mut cells = 0;
    for entry in fs::read_dir(&a).unwrap() {
        let entry = entry.unwrap();
        if entry.path().is_dir() {
            let name = entry.file_name();
            assert_eq!(
                sha256_file(&entry.path().join("trace.csv")).unwrap(),
                sha256_file(&b.join(&name).join("trace.csv")).unwrap()
            );
            cells += 1;
        }
    }
    assert_eq!(cells, 6);
}

#[test]
fn grid_records_divergent_cells_without_aborting() {
    let tmp = TempDir::new().unwrap();
    let text = QUADRATIC
        .replace(r#""kind": "delta-gclip", "eta": 0.09, "gamma": 1.0, "delta": 0.5"#, r#""kind": "constant", "eta": 0.05"#)
        .replace("\"iterations\": 200,", "\"iterations\": 2000, \"grid\": {\"eta\": [0.05, 10.0]},");
    let cfg = write_cfg(tmp.path(), "g.cfg", &text);
    let out = tmp.path().join("out");
    assert_eq!(code(&run(&["grid"], &cfg, &out)), 0);
    let summary = fs::read_to_string(out.join("grid_summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(!rows[0].contains(",diverged,") && rows[0].ends_with(",true"), "{}", rows[0]);
    assert!(rows[1].contains(",diverged,") && rows[1].ends_with(",false"));
}

#[test]
fn grid_needs_axes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_cfg(tmp.path(), "q.cfg", QUADRATIC);
    let o = run(&["grid"], &cfg, &tmp.path().join("out"));
    assert_eq!(code(&o), 2);
}

#[test]
fn stochastic_recipe_config_reports_the_bound() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run(&["run"], &examples_dir().join("stochastic_recipe.cfg"), &out);
    assert_eq!(code(&o), 0);
    let report = json(&out.join("report.json"));
    let s = &report["analysis"]["stochastic"];
    assert_eq!(s["params"]["T"], 16);
    assert_eq!(s["params"]["eta"], 0.05);
    assert_eq!(s["applicable"], true);
    assert!(s["bound"].as_f64().unwrap() > 0.25);
    assert_eq!(report["iterations"], 16);
}
