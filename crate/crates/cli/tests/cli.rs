use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use geofix_cli::config::parse;
use geofix_cli::ExperimentConfig;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_geofix"));
    c.env_remove("GEOFIX_OUT");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

const KM_ROTATION: &str = r#"{
    "space": {"kind": "model", "kappa": 0.0, "dim": 2},
    "operator": {"kind": "planar_rotation", "angle": 1.1},
    "iteration": {"kind": "km", "schedule": {"kind": "constant", "value": 0.5}, "horizon": 40},
    "checks": [{"kind": "km_bound", "diam": 2.0}],
    "seed": 11
}"#;

#[test]
fn km_trace_has_horizon_plus_one_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "km.json", KM_ROTATION);
    let out = tmp.path().join("out");
    let o = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,residual,step_dist,dist_to_fix,lambda"));
    assert_eq!(lines.count(), 41);
    for f in ["meta.json", "report.json", "report_km_bound.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn expansive_operator_violates_the_km_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = configs().join("dilation_violation.json");
    let o = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("report.json"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["violated"], true);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let body = KM_ROTATION
        .replace(r#""kappa": 0.0, "dim": 2"#, r#""kappa": -1.0, "dim": 3"#)
        .replace("planar_rotation", "elliptic_rotation");
    let cfg = write(tmp.path(), "km.json", &body);
    let read = |dir: &str| {
        let out = tmp.path().join(dir);
        assert!(
            run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
                .status
                .success()
        );
        fs::read(out.join("trace.csv")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn seed_changes_the_sampled_start() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "km.json", KM_ROTATION);
    let read = |seed: &str| {
        let out = tmp.path().join(seed);
        let o = run(&[
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert!(o.status.success());
        fs::read(out.join("trace.csv")).unwrap()
    };
    assert_ne!(read("1"), read("2"));
}

#[test]
fn example_configs_round_trip() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        if path.file_name().unwrap() == "frechet_bench.json" {
            continue;
        }
        let cfg = ExperimentConfig::from_file(&path).unwrap();
        let again: ExperimentConfig = parse(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(
        tmp.path(),
        "bad.json",
        &KM_ROTATION.replace("\"horizon\": 40", "\"horizon\": -1"),
    );
    let o = run(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("iteration.horizon"));
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn env_var_sets_the_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "km.json", KM_ROTATION);
    let out = tmp.path().join("from_env");
    let o = bin()
        .args(["run", cfg.to_str().unwrap(), "--horizon", "5"])
        .env("GEOFIX_OUT", &out)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        fs::read_to_string(out.join("trace.csv")).unwrap().lines().count(),
        7
    );
}

#[test]
fn sequence_space_right_shift() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = configs().join("right_shift.json");
    let o = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--horizon",
        "50",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let n: f64 = f[0].parse().unwrap();
        let r: f64 = f[1].parse().unwrap();
        assert!(r >= 1.0 / (n + 1.0).sqrt() - 1e-12);
    }
}

#[test]
fn verify_geometry_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["verify", "geometry", "--out", tmp.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.matches("PASS").count(), 6, "{text}");
    assert!(tmp.path().join("verify_geometry.json").exists());
}

#[test]
fn frechet_bench_writes_both_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("frechet_bench.json");
    let o = run(&[
        "bench",
        "frechet",
        cfg.to_str().unwrap(),
        "--horizon",
        "200",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["halpern_gd.csv", "rsgd.csv", "bench.json"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
    let bench: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("bench.json")).unwrap()).unwrap();
    assert!(bench["rsgd"]["final_dist"].as_f64().unwrap() < 1e-8);
}
