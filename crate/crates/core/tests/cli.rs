use std::process::{Command, Output};

fn ehbounds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ehbounds")).args(args).env_remove("EHBOUNDS_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o).lines().skip(2).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn bounds_reference_row() {
    let o = ehbounds(&["bounds"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(
        lines.next().unwrap(),
        "model,snr,n,l,eps,achievable,achievable_feasible,achievable_violation,converse,converse_feasible,converse_violation"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let ach: f64 = row[5].parse().unwrap();
    let conv: f64 = row[8].parse().unwrap();
    assert!((ach - 4603.2).abs() < 0.05);
    assert!((conv - 5077.4).abs() < 0.05);
    // both side conditions fail at this n, and the row is still emitted
    assert_eq!(row[6], "false");
    assert_eq!(row[9], "false");
}

#[test]
fn linear_capacity_forwards_closed_form() {
    let o = ehbounds(&[
        "linear-capacity",
        "--set",
        r#"model={"family":"exponential","params":{"mean":1}}"#,
        "--set",
        "lambda=1",
        "--set",
        "eps=0.6321205588285577",
        "--set",
        "mode=threshold",
    ]);
    assert!(o.status.success());
    let r = rows(&o);
    assert_eq!(r.len(), 1);
    assert!((r[0][7].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn json_output_carries_config() {
    let o = ehbounds(&["design", "--format", "json", "--seed", "77"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 77);
    assert_eq!(v["config"]["command"], "design");
    assert!(v["config"].get("workers").is_none());
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert!(v["rows"][0]["log_m"].is_number());
}

#[test]
fn selftest_passes() {
    let o = ehbounds(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(rows(&o).iter().all(|r| r[1] == "true"));
}

#[test]
fn validation_errors_exit_two() {
    for args in [
        &["bounds", "--set", "eps=1.5"][..],
        &["bounds", "--set", "model.family=gamma"],
        &["bounds", "--set", "unknown=1"],
        &["bounds", "--set", "noequals"],
        &["bounds", "--out", "/nonexistent/dir/out.csv"],
        &["bounds", "--config", "/nonexistent/config.json"],
        &["second-order", "--set", "regime=sideways"],
        &["linear-capacity", "--set", "mode=median"],
        &["outage-sim", "--set", "trials=0"],
        &["outage-sim", "--workers", "0"],
        &["frobnicate"],
    ] {
        let o = ehbounds(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(!err.is_empty(), "{args:?}");
        if args[0] != "frobnicate" {
            assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
        }
    }
}

#[test]
fn help_documents_headers() {
    let o = ehbounds(&["outage-sim", "--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("Output columns: model,snr,n,l,eps1,m,t_n,chernoff_bound"));
    assert!(text.contains("EHBOUNDS_WORKERS"));
}

#[test]
fn config_file_then_set_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let out = dir.path().join("o.csv");
    std::fs::write(&cfg, r#"{"n": [1000, 2000], "eps": 0.3, "seed": 5}"#).unwrap();
    let o = ehbounds(&[
        "bounds",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "eps=[0.2,0.4]",
        "--seed",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains(r#""eps":[0.2,0.4]"#));
    assert!(text.contains(r#""seed":6"#));
    assert_eq!(text.lines().count(), 2 + 4);
}

#[test]
fn worker_env_is_honored_only_without_flag() {
    let run = |env: &str, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_ehbounds"));
        c.args(["outage-sim", "--set", "trials=5000"]).env("EHBOUNDS_WORKERS", env);
        if let Some(w) = flag {
            c.args(["--workers", w]);
        }
        c.output().unwrap()
    };
    assert_eq!(run("zero", None).status.code(), Some(2));
    let with_flag = run("zero", Some("2"));
    assert!(with_flag.status.success());
    assert_eq!(run("3", None).stdout, with_flag.stdout);
}

#[test]
fn infeasible_points_are_emitted() {
    let o = ehbounds(&["outage-sim", "--set", "l=4", "--set", "n=16", "--set", "eps1=0.5", "--set", "trials=100"]);
    assert!(o.status.success());
    let r = rows(&o);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][8], "false");
}
