use std::fs;
use std::path::Path;
use std::process::Command;

fn kgnr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kgnr"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

const LINEAR: &str = r#"{
    "experiment": "linear_convergence_in_c",
    "K": 16, "T": 1.0, "tau": 0.1, "tau_ref": 1e-5,
    "c_list": [4.0, 8.0, 16.0, 32.0, 64.0],
    "lambda": -1.0, "p": 0,
    "initial_data": "complex_cosine",
    "output_dir": "OUT"
}"#;

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    let cfg = write_config(dir.path(), &LINEAR.replace("OUT", out.to_str().unwrap()));
    let res = kgnr().arg("run").arg(&cfg).output().unwrap();
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("first_order: slope"));
    for f in ["results.csv", "results.json", "plot.gp"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 10);
}

#[test]
fn output_dir_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &LINEAR.replace("OUT", "unused"));
    let out = dir.path().join("elsewhere");
    let res = kgnr()
        .arg("run")
        .arg(&cfg)
        .arg("--output-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert!(res.status.success());
    assert!(out.join("results.csv").is_file());
}

#[test]
fn bad_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "nope"}"#);
    let res = kgnr().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(res.status.code(), Some(1));
    let missing = kgnr()
        .arg("run")
        .arg(dir.path().join("absent.json"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn guard_violation_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = LINEAR
        .replace("linear_convergence_in_c", "cubic_first_order_in_c")
        .replace("\"p\": 0", "\"p\": 1")
        .replace("\"tau_ref\": 1e-5", "\"tau_ref\": 1e-3")
        .replace("OUT", dir.path().join("r").to_str().unwrap());
    let res = kgnr()
        .arg("run")
        .arg(write_config(dir.path(), &body))
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("tau_ref * c^2"));
    assert!(!dir.path().join("r").exists());
}

#[test]
fn list_experiments_names_every_kind() {
    let res = kgnr().arg("list-experiments").output().unwrap();
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    for name in [
        "linear_convergence_in_c",
        "cubic_first_order_in_c",
        "cubic_second_order_in_c",
        "tau_convergence",
        "conservation_study",
    ] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn verify_reports_pass_and_fail_codes() {
    let ok = kgnr()
        .args(["verify", "--criterion", "1", "--criterion", "7"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&ok.stdout);
    assert_eq!(ok.status.code(), Some(0), "{text}");
    assert!(text.contains("PASS criterion 1") && text.contains("PASS criterion 7"));

    let bad = kgnr()
        .args(["verify", "--criterion", "6"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL criterion 6"));
}
