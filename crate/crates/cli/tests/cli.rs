use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anisodnl"))
}

fn run_with(dir: &Path, toml: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, toml).unwrap();
    bin().arg(args[0]).arg("--config").arg(&cfg).args(&args[1..]).output().unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

const SMALL: &str = "grid = [9]\n[solver]\ndt = 0.03125\n";

#[test]
fn constant_scenario_writes_verified_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let toml = format!("scenario = \"constant\"\npreset = \"porous\"\nks = [1, 4]\n{SMALL}");
    let res = run_with(dir.path(), &toml, &["run", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let m = manifest(&out);
    let files = m["files"].as_array().unwrap();
    assert!(files.iter().any(|f| f["file"] == "report.json"));
    assert!(files.iter().any(|f| f["file"] == "constant_k4_final.csv"));
    for f in files {
        let bytes = fs::read(out.join(f["file"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "anisodnl-report/1");
    assert_eq!(report["passed"], true);
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn identical_runs_produce_identical_manifests() {
    let dir = tempfile::tempdir().unwrap();
    for scenario in ["cascade", "comparison"] {
        let toml = format!("scenario = \"{scenario}\"\npreset = \"anisotropic\"\nseed = 5\n[options]\npairs = 2\n");
        let mut seen = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{scenario}{run}"));
            let res = run_with(
                dir.path(),
                &toml,
                &["run", "--out", out.to_str().unwrap(), "--grid", "9", "--k", "1,2", "--dt", "0.03125"],
            );
            assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
            seen.push(manifest(&out));
        }
        assert_eq!(seen[0], seen[1], "{scenario}");
    }
}

#[test]
fn cascade_tables_have_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let toml = format!("scenario = \"cascade\"\npreset = \"orthotropic\"\nks = [1, 2, 4]\n{SMALL}");
    let res = run_with(dir.path(), &toml, &["run", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    let table = fs::read_to_string(out.join("cascade_distances.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("k,k_next,distance,ordering_gap"));
    assert_eq!(lines.count(), 2);
    let field = fs::read_to_string(out.join("cascade_k4_final.csv")).unwrap();
    assert!(field.starts_with("x0,x1,value\n"));
    assert_eq!(field.lines().count(), 1 + 81);
}

#[test]
fn property_violation_gives_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // declared eps0 = 1 while the solution starts at 0.2
    let toml = r#"
scenario = "manufactured"
exact = { const = 1.0 }
grid = [9]
[problem]
lower = [0.0]
upper = [1.0]
horizon = 0.1
p = [2.0]
m = [1.0]
coefficients = [{ const = 1.0 }]
lambda = 1.0
boundary = { const = 1.0 }
initial = { const = 0.2 }
sigma = 3.0
eps0 = 1.0
"#;
    let res = run_with(dir.path(), toml, &["run", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stdout).contains("violation"));
    assert!(out.join("manifest.json").exists());
}

#[test]
fn validate_reports_disabled_analyses() {
    let dir = tempfile::tempdir().unwrap();
    let toml = r#"
scenario = "cascade"
[problem]
lower = [0.0, 0.0]
upper = [1.0, 1.0]
horizon = 0.1
p = [2.0, 2.0]
m = [1.0, 3.0]
coefficients = [{ const = 1.0 }, { const = 1.0 }]
lambda = 1.0
sigma = 1.5
"#;
    let res = run_with(dir.path(), toml, &["validate"]);
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("cascade: disabled (closeness fails on axis 1"), "{stdout}");
    assert!(stdout.contains("degiorgi: disabled"), "{stdout}");
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn validate_accepts_presets() {
    let dir = tempfile::tempdir().unwrap();
    let res = run_with(dir.path(), "scenario = \"cascade\"\npreset = \"anisotropic\"\n", &["validate"]);
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(res.status.success(), "{stdout}");
    assert!(stdout.contains("cascade: enabled"));
    assert!(stdout.contains("degiorgi: enabled"));
}

#[test]
fn calibrate_writes_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cal");
    let res = bin()
        .args(["calibrate", "--grid", "9", "--seed", "1", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let fixture: Value = serde_json::from_str(&fs::read_to_string(out.join("calibration.json")).unwrap()).unwrap();
    assert_eq!(fixture["b_sandwich"][0]["calibration"]["sup"], 2.0);
    let pow = fixture["power_inequality"][1]["calibration"]["sup"].as_f64().unwrap();
    assert!((pow - 2.0).abs() < 1e-12);
    assert!(fixture["troisi"]["calibration"]["constant"].as_f64().unwrap() > 0.0);
}

#[test]
fn rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    for toml in [
        "scenario = \"plot\"\npreset = \"porous\"\n",
        "scenario = \"cascade\"\n",
        "scenario = \"cascade\"\npreset = \"porous\"\ngrid = [2]\n",
        "scenario = \"cascade\"\npreset = \"nope\"\n",
        "scenario = \"cascade\"\npreset = \"porous\"\ncolour = 1\n",
    ] {
        let res = run_with(dir.path(), toml, &["run", "--out", dir.path().join("o").to_str().unwrap()]);
        assert_eq!(res.status.code(), Some(2), "{toml}");
    }
}

#[test]
fn shipped_configs_validate() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let res = bin().arg("validate").arg("--config").arg(&path).output().unwrap();
        assert!(res.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&res.stdout));
    }
}
