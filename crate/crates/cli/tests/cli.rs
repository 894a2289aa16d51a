use std::path::Path;
use std::process::Command;

use cfsgauge_cli::{run, ExperimentConfig, RunOptions};

const PI: &str = "3.141592653589793";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cfsgauge"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn massive(tasks: &str) -> String {
    format!(
        r#"{{"box": {{"L": {PI}, "eps": 0.4, "m": 1.0}},
            "points": {{"explicit": [[0.0, 0.0, 0.0, 0.0], [0.4, 1.0, -2.0, 0.5]]}},
            "seed": 3, "tasks": {tasks}}}"#
    )
}

#[test]
fn dim_count_reports_mode_count() {
    let cfg = ExperimentConfig::parse(&massive(r#"["dim-count"]"#)).unwrap();
    let (report, _) = run(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(report.mode_count, 114);
    let e = report.entries.iter().find(|e| e.name == "dim_count.manifold_dimension").unwrap();
    assert_eq!(e.measured, (8 * 114 - 16) as f64);
    assert!(report.all_pass(), "{report:#?}");
}

#[test]
fn charts_report_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &massive(r#"["charts"]"#));
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let status = bin().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap().status;
        assert_eq!(status.code(), Some(0));
        outputs.push(std::fs::read(out.join("report.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let par = dir.path().join("par");
    let status = bin().arg("run").arg(&cfg).arg("--out").arg(&par).arg("--parallel").output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    assert_eq!(outputs[0], std::fs::read(par.join("report.json")).unwrap());
}

#[test]
fn seed_flag_overrides_config() {
    let cfg = ExperimentConfig::parse(&massive(r#"["charts"]"#)).unwrap();
    let (a, _) = run(&cfg, &RunOptions { seed: Some(99), ..RunOptions::default() }).unwrap();
    let (b, _) = run(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(a.seed, 99);
    assert_eq!(b.seed, 3);
    assert_ne!(a.to_json(), b.to_json());
}

#[test]
fn invalid_eps_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = massive(r#"["dim-count"]"#).replace("\"eps\": 0.4", "\"eps\": -0.1");
    let cfg = write_config(dir.path(), &body);
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("box.eps"));
    let err = ExperimentConfig::parse(&body).unwrap_err();
    assert_eq!(err.field, "box.eps");
}

#[test]
fn other_config_errors() {
    let bad_tol = massive(r#"["dim-count"]"#).replace("\"seed\": 3", "\"seed\": 3, \"tolerances\": {\"tol\": 0.0}");
    assert_eq!(ExperimentConfig::parse(&bad_tol).unwrap_err().field, "tolerances.tol");
    let empty = massive(r#"["dim-count"]"#).replace("[[0.0, 0.0, 0.0, 0.0], [0.4, 1.0, -2.0, 0.5]]", "[]");
    assert_eq!(ExperimentConfig::parse(&empty).unwrap_err().field, "points.explicit");
    let unknown = massive(r#"["fly"]"#);
    assert_eq!(ExperimentConfig::parse(&unknown).unwrap_err().field, "json");
}

#[test]
fn perturb_on_massive_box_is_a_task_error() {
    let cfg = ExperimentConfig::parse(&massive(r#"["perturb", "dim-count"]"#)).unwrap();
    let (report, _) = run(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(report.task_errors.len(), 1);
    assert_eq!(report.task_errors[0].task, "perturb");
    // the run continues after the failing task
    assert!(report.entries.iter().any(|e| e.name == "dim_count.mode_count"));
    assert!(!report.all_pass());
}

#[test]
fn massless_run_writes_report_and_kernels() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        r#"{{"box": {{"L": {PI}, "eps": 0.45454545454545453, "m": 0.0}},
            "points": {{"grid": {{"nt": 1, "nx": 2, "t_range": [0.25, 0.25]}}}},
            "seed": 5, "tasks": ["gauge", "spectral", "perturb"]}}"#
    );
    let cfg = write_config(dir.path(), &body);
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let entries = report["entries"].as_array().unwrap();
    assert!(entries.iter().all(|e| e["pass"] == true && e["paper_ref"].as_str().is_some_and(|s| !s.is_empty())));
    assert_eq!(report["mode_count"], 64);

    let mut rdr = csv::Reader::from_path(dir.path().join("kernels.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "x1", "x2", "x3", "row", "col", "re", "im"]);
    assert_eq!(rdr.records().count(), 8 * 16);
}

#[test]
fn dim_and_modes_subcommands() {
    let out = bin().args(["dim", "2", "2", "8"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "48");
    let out = bin().args(["modes", PI, "0.4", "1"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "114");
    let out = bin().args(["modes", PI, "0", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
