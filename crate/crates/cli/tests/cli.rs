use std::path::Path;
use std::process::{Command, Output};

use gevrey_flow_core::experiment::{
    ExperimentConfig, InitialData, LatticeSpec, ScheduleSource, TrackingSpec, SCHEMA_VERSION,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gevrey-flow"))
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn gevrey-flow")
}

fn taylor_green_config(out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        lattice: LatticeSpec { dim: 2, n: 4 },
        tracking: TrackingSpec {
            s: 2.0,
            r: 3.0,
            tau0: 0.4,
        },
        initial: InitialData::Exact {
            name: "taylor_green_2d".into(),
        },
        schedule: ScheduleSource::Configured { c1: 0.0, c2: 0.5 },
        dt: 1e-2,
        t_end: 0.25,
        nu_list: vec![1e-1, 1e-2, 1e-3],
        seed: 0,
        blowup_factor: 10.0,
        checkpoint_every: 0,
        output_dir: Some(out.to_path_buf()),
    }
}

fn write_config(dir: &Path, cfg: &ExperimentConfig) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

#[test]
fn solve_runs_a_named_exact_flow() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["solve", "--exact", "taylor_green_2d", "--nu", "0.01", "--T", "0.25"])
        .args(["--dt", "0.01", "--out"])
        .arg(dir.path()));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("manifest.json").exists());
    assert!(dir.path().join("norms_1e-2.csv").exists());
    assert!(dir.path().join("final_field.json").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["termination"], "\"completed\"");
}

#[test]
fn solve_requires_exactly_one_source() {
    let out = run(bin().args(["solve", "--T", "1"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_with_missing_config_names_the_file() {
    let out = run(bin().args(["sweep", "--config", "missing.json"]));
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing.json"), "{stderr}");
}

#[test]
fn sweep_rejects_malformed_config_with_line_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = taylor_green_config(&dir.path().join("out"));
    let mut value = serde_json::to_value(&cfg).unwrap();
    value["mystery_knob"] = serde_json::json!(true);
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    let out = run(bin().arg("sweep").arg("--config").arg(&path));
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("mystery_knob"), "{stderr}");
    assert!(stderr.contains("line"), "{stderr}");
}

#[test]
fn sweep_writes_artifacts_and_gates_on_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let path = write_config(dir.path(), &taylor_green_config(&out_dir));
    let out = run(bin().arg("sweep").arg("--config").arg(&path));
    // A decaying exact flow has viscosity-proportional budgets, so the
    // dissipation verdict fails while everything else passes.
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("w_monotone_in_nu: pass"), "{stdout}");
    assert!(stdout.contains("dissipation_budget: FAIL"), "{stdout}");
    for name in ["manifest.json", "sweep.csv", "report.json", "norms_0e0.csv"] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert!(report["verdicts"]["velocity_rate"].as_bool().unwrap());

    let gate = run(bin().arg("report").arg("--dir").arg(&out_dir));
    assert_eq!(gate.status.code(), Some(1));
    let text = String::from_utf8_lossy(&gate.stdout);
    assert!(text.contains("velocity_rate: pass"), "{text}");
}

#[test]
fn sweep_seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let mut cfg = taylor_green_config(&out_dir);
    cfg.seed = 3;
    let path = write_config(dir.path(), &cfg);
    let out = run(bin()
        .arg("sweep")
        .arg("--config")
        .arg(&path)
        .args(["--seed", "7"]));
    assert!(out.status.code().is_some(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["seed"], 7);
}

#[test]
fn output_env_var_roots_relative_directories() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = taylor_green_config(Path::new("nested/run"));
    cfg.output_dir = Some("nested/run".into());
    let path = write_config(dir.path(), &cfg);
    let out = run(bin()
        .arg("sweep")
        .arg("--config")
        .arg(&path)
        .env("GEVREY_FLOW_OUT", dir.path()));
    assert!(out.status.code().is_some());
    assert!(
        dir.path().join("nested/run/sweep.csv").exists(),
        "outputs not rooted under the env var"
    );
}

#[test]
fn verify_emits_certification_reports() {
    let out = run(bin().args(["verify", "--suite", "elementary-exp", "--samples", "301"]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let arr = reports.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["id"], "elementary_exp");
    assert_eq!(arr[0]["verdict"], "pass");

    let out = run(bin().args(["verify", "--suite", "scalar-gevrey", "--s", "2", "--grid", "60"]));
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let sup = reports[0]["sup_ratio"].as_f64().unwrap();
    assert!((sup - 1.0).abs() < 1e-12, "s = 2 ratio is identically 1, got {sup}");

    let out = run(bin().args(["verify", "--suite", "no-such-suite"]));
    assert_eq!(out.status.code(), Some(2));
}
