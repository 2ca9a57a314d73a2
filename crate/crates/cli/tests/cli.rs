use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pareto-tas"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pareto-tas-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_toy(dir: &Path, gap: f64) -> PathBuf {
    let path = dir.join("toy.json");
    std::fs::write(&path, format!(r#"{{"means": [[0.0], [{gap}]], "variances": [1.0]}}"#)).unwrap();
    path
}

#[test]
fn solve_two_arm_toy() {
    let dir = scratch("solve");
    let toy = write_toy(&dir, 1.0);
    let o = bin()
        .args(["solve", "--instance", toy.to_str().unwrap(), "--iterations", "100000", "--tolerance", "1e-6"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("solve.json")).unwrap()).unwrap();
    assert!((report["t_star"].as_f64().unwrap() - 8.0).abs() < 1e-4);
    assert_eq!(report["converged"], true);
}

#[test]
fn solve_reports_non_convergence() {
    let o = bin().args(["solve", "--iterations", "10", "--tolerance", "1e-9"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NOT converged"));
}

#[test]
fn simulate_is_reproducible_across_worker_counts() {
    let dir = scratch("simulate");
    let toy = write_toy(&dir, 5.0);
    let run = |threads: &str, sub: &str| {
        let out = dir.join(sub);
        let o = bin()
            .args(["simulate", "--instance", toy.to_str().unwrap(), "--runs", "50", "--seed", "9"])
            .args(["--t-star-iterations", "1000", "--out"])
            .arg(&out)
            .env("PARETO_TAS_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        (std::fs::read(out.join("simulate.csv")).unwrap(), out)
    };
    let (a, out) = run("1", "a");
    let (b, _) = run("3", "b");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("seed,tau,correct,aborted,answer,n_0,n_1\n9,"));
    assert_eq!(text.lines().count(), 51);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2) == Some("true")));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("simulate_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["error_rate"], 0.0);
    assert!(summary["lower_bound_tau"].as_f64().unwrap() > 0.0);
}

#[test]
fn bad_thread_variable_is_rejected() {
    let o = bin().args(["simulate", "--runs", "1"]).env("PARETO_TAS_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_writes_csv() {
    let dir = scratch("bench");
    let o = bin()
        .args(["bench", "--pd-grid", "2,2;4,2;3,3", "--samples", "2", "--min-time-ms", "0.1", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.join("bench.csv")).unwrap();
    assert!(csv.starts_with("p,d,k,strategy,mean_seconds,std_seconds,samples\n"));
    assert_eq!(csv.lines().count(), 1 + 5);
    let ratio = std::fs::read_to_string(dir.join("bench_ratio.csv")).unwrap();
    assert!(ratio.starts_with("p,fast_seconds,generic_seconds,ratio\n"));
    assert_eq!(ratio.lines().count(), 3);
}

#[test]
fn verify_passes_and_zero_budget_warns() {
    let o = bin().args(["verify", "--budget", "30"]).output().unwrap();
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 7);

    let o = bin().args(["verify", "--budget", "0"]).output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[cfg(debug_assertions)]
#[test]
fn verify_catches_injected_fault() {
    let o = bin().args(["verify", "--budget", "50", "--mutate"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL oracle-equivalence"));
}

#[test]
fn unknown_instance_file_fails() {
    let o = bin().args(["solve", "--instance", "/nonexistent/instance.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
