use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lifted-sde"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

/// Every file under `dir`, relative path and contents, in sorted order.
fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push((path.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn zero_coefficients_give_constant_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["simulate"], &config("zero.toml"), tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("paths/replication_00000.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,U_1,U_2,is_large_jump"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 17);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(&cols[1..], &["0.25", "-1.5", "0"], "{row}");
    }
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["runs"][0]["final_state"], serde_json::json!([0.25, -1.5]));
}

#[test]
fn same_config_and_seed_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run(&["simulate", "--replications", "3"], &config("explicit.toml"), dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    assert_eq!(sa.len(), 4);
    assert_eq!(sa, sb);

    // a different seed changes the paths
    let c = tempfile::tempdir().unwrap();
    run(&["simulate", "--replications", "3", "--seed", "1"], &config("explicit.toml"), c.path());
    assert_ne!(snapshot(c.path())[0], sa[0]);
}

#[test]
fn thread_count_does_not_change_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(&["simulate", "--threads", "1"], &config("explicit.toml"), a.path());
    run(&["simulate", "--threads", "3"], &config("explicit.toml"), b.path());
    assert_eq!(snapshot(a.path()), snapshot(b.path()));
}

#[test]
fn preset_truncation_and_growth_checks_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["verify"], &config("lifted.toml"), tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["truncation", "growth"] {
        let report: serde_json::Value =
            serde_json::from_slice(&fs::read(tmp.path().join(format!("reports/{name}.json"))).unwrap()).unwrap();
        assert_eq!(report["pass"], true, "{name}: {report}");
    }
}

#[test]
fn failing_check_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "preset = \"lifted\"\nchecks = [\"uniqueness\"]\n\
         [check_options.uniqueness]\nreplications = 2\nsteps = [16, 32]\ntolerance = 1e-300\n",
    );
    let out = run(&["verify"], &cfg, &tmp.path().join("out"));
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn failing_negative_control_exits_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "preset = \"lifted\"\nchecks = [\"uniqueness_control\"]\n\
         [check_options.uniqueness]\nreplications = 2\nsteps = [16, 32]\n",
    );
    let out = run(&["verify"], &cfg, &tmp.path().join("out"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("out/reports/uniqueness_control.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["negative_control"], true);
}

#[test]
fn invalid_config_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "preset = \"lifted\"\n[solver_options]\nk_max = -3\n");
    let out = run(&["simulate"], &cfg, &tmp.path().join("out"));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("solver_options.k_max"), "{err}");
    assert!(!tmp.path().join("out").exists(), "nothing is written for an invalid config");
}

#[test]
fn cubic_preset_reports_the_explosion() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["simulate"], &config("cubic.toml"), tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("summary.json")).unwrap()).unwrap();
    let run = &summary["runs"][0];
    assert_eq!(run["explosion"]["exploded"], true);
    assert!(run["final_state"].is_null());
    let csv = fs::read_to_string(tmp.path().join("paths/replication_00000.csv")).unwrap();
    assert!(csv.lines().last().unwrap().contains("inf"));
}

#[test]
fn hermite_utilities() {
    let out = bin().args(["hermite", "eval", "--n", "0", "--x", "0"]).output().unwrap();
    assert!(out.status.success());
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((v - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);

    let tmp = tempfile::tempdir().unwrap();
    let out = bin().args(["hermite", "delta0", "--cutoff", "8"]).output().unwrap();
    assert!(out.status.success());
    let delta = tmp.path().join("delta.json");
    fs::write(&delta, &out.stdout).unwrap();

    // <h_0, τ_z δ_0> = h_0(z) up to truncation
    let out = bin()
        .args(["hermite", "translate", "--z", "-0.5", "--input"])
        .arg(&delta)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let moved: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(moved["cutoff"], 8);

    let out = bin().args(["hermite", "norm", "--p", "0", "--input"]).arg(&delta).output().unwrap();
    let norm: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!(norm > 0.0);

    let out = bin()
        .args(["hermite", "project", "--function", "gaussian", "--cutoff", "6"])
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["dim"], 1);

    let out = bin().args(["hermite", "eval", "--n", "0,1", "--x", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
