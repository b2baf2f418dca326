use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn elastica(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elastica"))
        .args(args)
        .current_dir(dir)
        .env("ELASTICA_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|c| c == name).expect("column present");
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn concentration_writes_curves_and_constant_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let out = elastica(tmp.path(), &["concentration", "--jmax", "10", "--n", "1024", "--output-dir", "run"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let run = tmp.path().join("run");
    for j in 1..=10 {
        assert!(run.join(format!("curve_j{j:03}.csv")).is_file(), "curve {j}");
    }
    let report = std::fs::read_to_string(run.join("report.csv")).unwrap();
    let energies = column(&report, "energy");
    assert_eq!(energies.len(), 10);
    for b in energies {
        assert!((b - 3.04638).abs() < 1e-5, "B = {b}");
    }
}

#[test]
fn manifest_lists_every_output_with_its_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let out = elastica(tmp.path(), &["family", "--m", "0.4", "--length", "2", "--output-dir", "fam"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let dir = tmp.path().join("fam");
    let manifest = read_json(&dir.join("manifest.json"));
    let files = manifest["files"].as_array().unwrap();
    let listed: Vec<&str> = files.iter().map(|f| f["path"].as_str().unwrap()).collect();
    let mut on_disk: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    let mut sorted = listed.clone();
    sorted.sort();
    assert_eq!(sorted, on_disk);
    for f in files {
        let bytes = std::fs::read(dir.join(f["path"].as_str().unwrap())).unwrap();
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(f["sha256"].as_str().unwrap(), hex);
    }
    // The resolved configuration is echoed in full, defaults included.
    let config = &manifest["config"];
    assert_eq!(config["m"], 0.4);
    assert_eq!(config["seed"], 0);
    assert!(config.get("torsion_sign").is_some());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let out = elastica(
            tmp.path(),
            &["penalized", "--p1", "0,0", "--v0", "1,0", "--v1", "1,0", "--n", "256", "--seed", "7", "--output-dir", dir],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    for f in ["curve.csv", "result.json"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn penalized_closed_data_gives_the_circle_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let out = elastica(tmp.path(), &["penalized", "--p1", "0,0", "--v0", "1,0", "--v1", "1,0", "--lambda", "1", "--output-dir", "o"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let result = read_json(&tmp.path().join("o/result.json"));
    let e = result["energy"].as_f64().unwrap();
    assert!((e - 4.0 * std::f64::consts::PI).abs() < 0.005 * 4.0 * std::f64::consts::PI, "E = {e}");
}

#[test]
fn segment_data_gives_a_segment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = elastica(tmp.path(), &["minimize", "--p1", "2,0", "--v0", "1,0", "--v1", "1,0", "--length", "2", "--output-dir", "o"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let result = read_json(&tmp.path().join("o/result.json"));
    assert!(result["energy"].as_f64().unwrap().abs() < 1e-12);
    let curve = std::fs::read_to_string(tmp.path().join("o/curve.csv")).unwrap();
    assert!(column(&curve, "p2").iter().all(|y| y.abs() < 1e-12));
}

#[test]
fn file_config_with_cli_override() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("run.toml"),
        "command = \"family\"\nm = 0.3\nlength = 1.5\noutput_dir = \"from-file\"\n",
    )
    .unwrap();
    let out = elastica(tmp.path(), &["family", "--config", "run.toml", "--m", "0.6"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let manifest = read_json(&tmp.path().join("from-file/manifest.json"));
    assert_eq!(manifest["config"]["m"], 0.6);
    assert_eq!(manifest["config"]["length"], 1.5);
}

#[test]
fn invalid_input_exits_with_two_and_a_line_number() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.toml"), "command = \"penalized\"\nlambda = 1\nfoo = 3\n").unwrap();
    let out = elastica(tmp.path(), &["penalized", "--config", "bad.toml"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("bad.toml:3: foo"), "{}", stderr(&out));

    let out = elastica(tmp.path(), &["penalized", "--lambda", "-1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("positive"), "{}", stderr(&out));

    let out = elastica(tmp.path(), &["minimize", "--p1", "3,0", "--length", "2"]);
    assert_eq!(code(&out), 2);

    let out = elastica(tmp.path(), &["family", "--jmax", "3"]);
    assert_eq!(code(&out), 2, "keys of other commands are rejected");
    assert!(!tmp.path().join("elastica-out").exists());
}

#[test]
fn validate_reports_without_side_effects() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("ok.toml"), "command = \"penalized\"\nlambda = 2\np1 = [0, 0]\n").unwrap();
    std::fs::write(tmp.path().join("neg.toml"), "command = \"penalized\"\n\nlambda = -1\n").unwrap();
    std::fs::write(tmp.path().join("far.toml"), "command = \"minimize\"\np1 = [5, 0]\nlength = 2\n").unwrap();

    let ok = elastica(tmp.path(), &["validate", "ok.toml"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let neg = elastica(tmp.path(), &["validate", "neg.toml"]);
    assert_eq!(code(&neg), 2);
    assert!(stderr(&neg).contains("neg.toml:3: lambda"), "{}", stderr(&neg));
    let far = elastica(tmp.path(), &["validate", "far.toml"]);
    assert_eq!(code(&far), 2);
    assert!(stderr(&far).contains("length"), "{}", stderr(&far));

    let entries: Vec<_> = std::fs::read_dir(tmp.path()).unwrap().collect();
    assert_eq!(entries.len(), 3, "validate must not write anything");
}

#[test]
fn verify_round_trips_a_solver_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let out = elastica(tmp.path(), &["penalized", "--p1", "0,0", "--v0", "1,0", "--v1", "1,0", "--output-dir", "p"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = elastica(
        tmp.path(),
        &[
            "verify", "--curve", "p/curve.csv", "--constraint", "penalized", "--lambda", "1", "--p1", "0,0", "--v0", "1,0",
            "--v1", "1,0", "--output-dir", "v",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = read_json(&tmp.path().join("v/verification.json"));
    assert!(report["residual_norm"].as_f64().unwrap() < 1e-3, "{report}");
}

#[test]
fn unconverged_runs_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = elastica(
        tmp.path(),
        &["minimize", "--p1", "1,0", "--v0", "0,1", "--v1", "0,-1", "--length", "2", "--outer-iters", "1", "--multistart", "1", "--output-dir", "o"],
    );
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    // Artifacts are still written for inspection.
    assert!(tmp.path().join("o/manifest.json").is_file());
}
