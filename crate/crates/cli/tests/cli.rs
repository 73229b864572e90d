use cli::{run, Command, Engine, RunConfig};
use std::path::Path;
use std::process::Command as Process;

fn ncorr(dir: &Path, args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_ncorr"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("NCORR_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn ncorr_q2_writes_json_with_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncorr(dir.path(), &["--n", "2", "--N", "20", "ncorr", "--q", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&dir.path().join("ncorr.json"));
    let result = &json["result"];
    let breakdown = result["breakdown"].as_array().expect("breakdown present");
    assert!(breakdown.len() >= 3);
    let sum: f64 = breakdown.iter().map(|e| e[1].as_f64().unwrap()).sum();
    let value = result["value"].as_f64().unwrap();
    assert!((sum - value).abs() <= 1e-12 * value.abs());
    assert_eq!(json["config"]["q"], 2);
    assert!(dir.path().join("ncorr_breakdown.csv").exists());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["--n", "2", "--N", "6", "--samples", "300", "--seed", "11", "ncorr", "--engine", "empirical"];
    for d in [&d1, &d2] {
        assert!(ncorr(d.path(), &args).status.success());
    }
    for name in ["ncorr.json", "ncorr.csv"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn config_hash_appears_in_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncorr(dir.path(), &["--N", "6", "--samples", "50", "paircorr", "--bins", "6"]);
    assert!(out.status.success());
    let hash = read_json(&dir.path().join("paircorr.json"))["config_hash"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        assert!(text.contains(&hash));
    }
    assert!(String::from_utf8_lossy(&out.stdout).contains(&hash));
}

#[test]
fn invalid_configuration_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ncorr(dir.path(), &["--n", "0", "ncorr"]).status.code(), Some(2));
    assert_eq!(ncorr(dir.path(), &["--n", "3", "ncorr", "--engine", "contour"]).status.code(), Some(2));
    assert_eq!(ncorr(dir.path(), &["ncorr", "--q", "7"]).status.code(), Some(2));
    let toml = dir.path().join("bad.toml");
    std::fs::write(&toml, "unknown_key = 1\n").unwrap();
    assert_eq!(ncorr(dir.path(), &["--config", toml.to_str().unwrap(), "ncorr"]).status.code(), Some(2));
    assert_eq!(ncorr(dir.path(), &["--config", "/nonexistent/run.toml", "ncorr"]).status.code(), Some(2));
}

#[test]
fn engine_precondition_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncorr(dir.path(), &["--budget", "2.5", "ncorr", "--q", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));
}

#[test]
fn flags_override_toml_values() {
    let dir = tempfile::tempdir().unwrap();
    let toml = dir.path().join("run.toml");
    std::fs::write(&toml, "n = 1\nN = 7\nbudget = 1.5\n[output]\nprefix = \"from_file\"\n").unwrap();
    let out = ncorr(dir.path(), &["--config", toml.to_str().unwrap(), "--N", "9", "ncorr", "--engine", "exact"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&dir.path().join("from_file.json"));
    assert_eq!(json["config"]["n"], 1);
    assert_eq!(json["config"]["N"], 9);
    assert_eq!(json["config"]["budget"], 1.5);
    assert_eq!(json["result"]["metadata"]["matrix_size"], 9);
}

#[test]
fn output_location_does_not_change_the_hash() {
    let mut a = RunConfig { n: 1, matrix_size: 5, ..RunConfig::default() };
    let mut b = a.clone();
    a.output.dir = Some("/tmp/one".into());
    b.output.dir = Some("/tmp/two".into());
    assert_eq!(a.hash(), b.hash());
    b.seed = 1;
    assert_ne!(a.hash(), b.hash());
}

#[test]
fn formula_engines_agree_through_the_library() {
    let base = RunConfig { command: Command::Ncorr, n: 3, matrix_size: 10, budget: 1.8, ..RunConfig::default() };
    let value = |q: usize| {
        let report = run(&RunConfig { q: Some(q), ..base.clone() }).unwrap();
        let json: serde_json::Value = serde_json::from_str(&report.artifacts[0].contents).unwrap();
        json["result"]["value"].as_f64().unwrap()
    };
    let (v1, v2, v3) = (value(1), value(2), value(3));
    assert!((v1 - v2).abs() <= 1e-9 * v1.abs() && (v2 - v3).abs() <= 1e-9 * v1.abs());
    let exact = run(&RunConfig { engine: Engine::Exact, ..base.clone() }).unwrap();
    assert!(exact.passed);
}

#[test]
fn ratios_and_jstar_commands_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncorr(dir.path(), &["--N", "4", "--samples", "4000", "ratios", "--alpha", "0.2,0.1", "--beta", "0.25"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&dir.path().join("ratios.json"));
    let z = json["result"]["z_re"].as_f64().unwrap().abs().max(json["result"]["z_im"].as_f64().unwrap().abs());
    assert!(z < 5.0, "Monte Carlo is {z} SE from the closed form");

    let out = ncorr(dir.path(), &["--N", "10", "jstar", "--a", "0.3", "--a", "0.5", "--b", "0.4"]);
    assert!(out.status.success());
    let json = read_json(&dir.path().join("jstar.json"));
    let terms = json["result"]["terms"].as_array().unwrap();
    let re: f64 = terms.iter().map(|t| t["value"][0].as_f64().unwrap()).sum();
    assert!((re - json["result"]["value"][0].as_f64().unwrap()).abs() < 1e-12);
    assert_eq!(json["result"]["spread"], true);
}

#[test]
fn sample_command_exports_phases() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ncorr(dir.path(), &["--N", "4", "--samples", "3", "sample"]).status.success());
    let csv = std::fs::read_to_string(dir.path().join("sample_phases.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config_hash="));
    assert_eq!(lines.len(), 2 + 3);
}

#[test]
fn small_concordance_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncorr(dir.path(), &["--samples", "1000", "validate", "--suite", "concordance"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS") && !stdout.contains("FAIL"));
    assert_eq!(read_json(&dir.path().join("validate.json"))["result"]["passed"], true);
}
