use std::path::Path;
use std::process::{Command, Output};

fn clambda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clambda"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).expect("stderr is one JSON object")
}

#[test]
fn verify_algebra_passes() {
    let o = clambda(&["verify-algebra", "--lambda", "3", "--alpha", "2,-2,0", "--dim", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("check,residual,scale,tolerance,passed"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn sweep_q_starts_at_small_z_limit() {
    let o = clambda(&["sweep-q", "--lambda", "2", "--alpha", "1,-1", "--mu", "0", "--zmax", "6", "--steps", "120"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let h = r.headers().unwrap().clone();
    let q = h.iter().position(|c| c == "Q_closed").unwrap();
    let rows: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 121);
    let first: f64 = rows[0][q].parse().unwrap();
    assert_eq!(first, 1.0);
}

#[test]
fn output_is_deterministic() {
    let args = ["sweep-squeeze", "--lambda", "2", "--alpha", "3", "--z-real-negative", "--steps", "40", "--format", "json"];
    let a = clambda(&args);
    let b = clambda(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.is_array() || v.is_object());
}

#[test]
fn invalid_input_exits_two() {
    let o = clambda(&["verify-algebra", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "InvalidLambda");

    let o = clambda(&["verify-cs", "--lambda", "2", "--alpha", "-3,3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "ConditionViolated");

    let o = clambda(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(error_json(&o)["message"].is_string());
}

#[test]
fn tolerance_failure_exits_one() {
    let o = clambda(&["verify-cs", "--lambda", "3", "--tol-cs", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    let v = error_json(&o);
    assert_eq!(v["error"], "ToleranceFailure");
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn config_file_drives_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("q.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"command": "sweep-q", "lambda": 3, "alpha": [-0.7, 0.7, 0.0], "mu": [1], "steps": 10, "out": {:?}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = clambda(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 12);

    std::fs::write(&cfg, r#"{"command": "sweep-q", "lamda": 3}"#).unwrap();
    let o = clambda(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dump_state_needs_a_point() {
    let o = clambda(&["dump-state", "--lambda", "2", "--mu", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = clambda(&["dump-state", "--lambda", "2", "--mu", "0", "--z", "1,2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap();
}

#[test]
fn reproduce_figures_writes_six_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = clambda(&["reproduce-figures", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fig3"] {
        let path = dir.path().join(format!("{name}.csv"));
        assert!(Path::new(&path).exists(), "{name}");
        let mut r = csv::Reader::from_path(&path).unwrap();
        assert!(r.records().count() > 100);
    }
}
