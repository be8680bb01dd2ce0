use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use irl_core::instances::{build_named, Params};
use irl_core::mdp::InstanceJson;
use serde_json::Value;
use tempfile::TempDir;

fn irlkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irlkit"))
        .args(args)
        .output()
        .expect("irlkit runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf8 path")
}

fn write_instance(dir: &TempDir, name: &str, params: &[&str]) -> PathBuf {
    let out = dir.path().join(format!("{name}.json"));
    let mut args = vec!["instance", name, "--out", path_str(&out)];
    for p in params {
        args.extend(["--param", p]);
    }
    let o = irlkit(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("JSON output")
}

#[test]
fn instance_file_round_trips_through_loader() {
    let dir = TempDir::new().unwrap();
    let f = write_instance(&dir, "example_state_only", &["eps=0.2"]);
    let inst: InstanceJson = serde_json::from_str(&std::fs::read_to_string(f).unwrap()).unwrap();
    let mut p = Params::new();
    p.insert("eps".into(), "0.2".into());
    let b = build_named("example_state_only", &p).unwrap();
    let (m, pi) = inst.to_tables().unwrap();
    assert_eq!(m, b.mdp);
    // The file stores probabilities only; compare those.
    assert_eq!(pi.table(), b.policy.table());
}

#[test]
fn small_delta_instance_validates() {
    let dir = TempDir::new().unwrap();
    let f = write_instance(&dir, "lb_small_delta", &["S=9", "A=2", "H=12"]);
    let inst: InstanceJson = serde_json::from_str(&std::fs::read_to_string(f).unwrap()).unwrap();
    let (m, _) = inst.to_tables().unwrap();
    assert_eq!((m.dims().s, m.dims().a, m.dims().h), (9, 2, 12));
}

#[test]
fn unknown_instance_is_a_usage_error() {
    assert_eq!(code(&irlkit(&["instance", "no_such_instance"])), 2);
    assert_eq!(code(&irlkit(&["instance", "lb_small_delta", "--param", "S=banana"])), 2);
    assert_eq!(code(&irlkit(&["frobnicate"])), 2);
}

#[test]
fn hausdorff_of_state_only_pair_is_one() {
    let dir = TempDir::new().unwrap();
    let f = write_instance(&dir, "example_state_only", &[]);
    let o = irlkit(&["hausdorff", path_str(&f)]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["exactness"], "exact");
}

#[test]
fn hausdorff_of_identical_files_is_zero() {
    let dir = TempDir::new().unwrap();
    let f = write_instance(&dir, "example_time_homogeneous", &[]);
    let o = irlkit(&["hausdorff", path_str(&f), path_str(&f)]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["value"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn hausdorff_beta_margin_pair_reports_both_sets_non_empty() {
    let dir = TempDir::new().unwrap();
    let f = write_instance(&dir, "example_beta_margin", &["eps=0.1", "H=11"]);
    // Exact mode exceeds the dimension cap: numerical failure exit.
    assert_eq!(code(&irlkit(&["hausdorff", path_str(&f)])), 3);
    let o = irlkit(&["hausdorff", path_str(&f), "--method", "randomized", "--samples", "8"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["exactness"], "lower-bound-only");
    assert_eq!(v["first_empty"], false);
    assert_eq!(v["second_empty"], false);
    assert!(v["value"].as_f64().unwrap().is_finite());
}

#[test]
fn hausdorff_dimension_mismatch_is_rejected() {
    let dir = TempDir::new().unwrap();
    let a = write_instance(&dir, "example_state_only", &[]);
    let b = write_instance(&dir, "fact_large_reward", &[]);
    assert_eq!(code(&irlkit(&["hausdorff", path_str(&a), path_str(&b)])), 2);
}

fn write_config(dir: &TempDir, body: &str) -> PathBuf {
    let p = dir.path().join("config.json");
    std::fs::write(&p, body).unwrap();
    p
}

const SMALL_RUN: &str = r#"{
  "grid": {"S": [2], "A": [2], "H": [2, 3], "epsilon": [1.5], "delta": [0.1],
           "variant": ["inhomogeneous-known", "inhomogeneous-unknown"], "pi_min": [null, 0.4]},
  "seeds": 3,
  "hausdorff": "exact"
}"#;

#[test]
fn run_writes_sorted_reproducible_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL_RUN);
    let out = dir.path().join("runs.csv");
    let args = ["run", "--config", path_str(&cfg), "--out", path_str(&out), "--seed", "5"];
    let o = irlkit(&args);
    // The exit status reflects whether every tau stayed under its bound.
    assert!(matches!(code(&o), 0 | 1), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&out).unwrap();
    let mut lines = first.lines();
    assert_eq!(
        lines.next().unwrap(),
        "S,A,H,epsilon,delta,variant,pi_min,seed,tau,rounds,eps_tau,capped,hausdorff_exact,hausdorff_value,\
         hausdorff_upper,upper_bound,lower_bound,tau_within_bound,error"
    );
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    // Two horizons, two variants, three seeds.
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r[18].is_empty() && r[12] == "true"));
    let seeds: Vec<&str> = rows[..3].iter().map(|r| r[7].as_str()).collect();
    assert_eq!(seeds, ["5", "6", "7"]);
    let summary = std::fs::read_to_string(dir.path().join("runs_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);

    irlkit(&args);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
}

#[test]
fn run_rejects_empty_grid_and_bad_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"grid": {"S": [], "A": [2], "H": [2], "epsilon": [1.0], "delta": [0.1], "variant": ["inhomogeneous-known"], "pi_min": [null]}}"#);
    assert_eq!(code(&irlkit(&["run", "--config", path_str(&cfg)])), 2);
    let cfg = write_config(&dir, r#"{"seeds": 0}"#);
    assert_eq!(code(&irlkit(&["run", "--config", path_str(&cfg)])), 2);
    let cfg = write_config(&dir, r#"{"instance": {"kind": "file", "path": "/nonexistent/instance.json"}}"#);
    assert_eq!(code(&irlkit(&["run", "--config", path_str(&cfg)])), 2);
    let cfg = write_config(&dir, r#"{"unexpected": 1}"#);
    assert_eq!(code(&irlkit(&["run", "--config", path_str(&cfg)])), 2);
}

#[test]
fn print_config_lists_every_default() {
    let o = irlkit(&["--print-config", "--seed", "9"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    for key in ["grid", "seeds", "base_seed", "instance", "max_samples", "hausdorff", "scaling", "out", "workers"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["base_seed"], 9);
    assert_eq!(v["instance"]["kind"], "random");
}

#[test]
fn bounds_table_orders_and_flags() {
    let o = irlkit(&["bounds", "-S", "9", "-A", "2", "-H", "12", "--eps", "0.5", "--delta", "0.01", "--pi-min", "0.2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<(String, f64, bool)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap(), f[2] == "true")
        })
        .collect();
    assert_eq!(rows.len(), 8);
    let min_upper = rows.iter().filter(|r| r.0.starts_with("upper")).map(|r| r.1).fold(f64::INFINITY, f64::min);
    assert!(rows.iter().filter(|r| r.0.starts_with("lower")).all(|r| r.2 && r.1 <= min_upper));

    let o = irlkit(&["bounds", "-S", "9", "-A", "2", "-H", "12", "--eps", "0.5", "--delta", "0.5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside its validity range"));
}

#[test]
fn verify_suites_and_exit_codes() {
    let o = irlkit(&["verify", "metrics", "--triples", "50"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v[0]["suite"], "metrics");
    assert_eq!(code(&irlkit(&["verify", "concentration"])), 0);
    assert_eq!(code(&irlkit(&["verify", "lipschitz", "--pairs", "3"])), 0);
    assert_eq!(code(&irlkit(&["verify", "nonsense"])), 2);
}

#[test]
fn scaling_reports_slope_and_requires_four_points() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"grid": {"S": [2], "A": [2], "H": [3], "epsilon": [1.0], "delta": [0.1],
                     "variant": ["inhomogeneous-known"], "pi_min": [null]}, "seeds": 2}"#,
    );
    let out = dir.path().join("scaling.csv");
    let o = irlkit(&["scaling", "--config", path_str(&cfg), "--out", path_str(&out), "--axis", "A", "--values", "2,3,4,6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let slope = json(&o)["slope"].as_f64().unwrap();
    assert!((0.8..=1.2).contains(&slope), "slope {slope}");
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 1 + 4 * 2);
    let o = irlkit(&["scaling", "--config", path_str(&cfg), "--out", path_str(&out), "--values", "2,3,4"]);
    assert_eq!(code(&o), 2);
}
