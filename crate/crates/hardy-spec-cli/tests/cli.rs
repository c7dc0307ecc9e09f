use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy-spec"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("HARDY_SPEC_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn config_problems_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["build", "--config", "/nonexistent/run.toml"], tmp.path());
    assert_eq!(code(&o), 2);
    let o = run(&["build", "--config", "builtin:no-such-config"], tmp.path());
    assert_eq!(code(&o), 2);
    let cfg = write_config(tmp.path(), "name = \"x\"\n[map]\npsi1 = \"i\"\npsi2 = \"i\"\ntypo = 3\n");
    let o = run(&["build", "--config", &cfg], tmp.path());
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    // a symbol that leaves the upper half-plane is rejected as a config error
    let cfg = write_config(tmp.path(), "name = \"x\"\n[map]\npsi1 = \"-i\"\npsi2 = \"i\"\n");
    assert_eq!(code(&run(&["build", "--config", &cfg], tmp.path())), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_hardy-spec"))
        .args(["build", "--config", "builtin:constants", "--out"])
        .arg(tmp.path())
        .env("HARDY_SPEC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn constant_spiral_starts_at_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["predict", "--config", "builtin:constants"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let spiral = read(tmp.path(), "spiral.csv");
    let rows = data_rows(&spiral);
    assert_eq!(rows[0], "0,0,0,1,0");
    // one cluster point per symbol: a single pair of 64 x 64 samples
    assert_eq!(rows.len(), 64 * 64);
    let svg = read(tmp.path(), "spiral.svg");
    assert_eq!(svg.matches("<path").count(), 1);
    let hash = spiral.lines().next().unwrap().trim_start_matches("# config_hash=").to_string();
    assert_eq!(hash.len(), 64);
    assert!(svg.contains(&hash));
    assert!(read(tmp.path(), "predicted.csv").starts_with(&format!("# config_hash={hash}")));
}

#[test]
fn svg_has_one_path_per_cluster_pair() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["predict", "--config", "builtin:quarter-cayley"], tmp.path())), 0);
    let spiral = read(tmp.path(), "spiral.csv");
    let pairs: std::collections::BTreeSet<&str> =
        data_rows(&spiral).iter().map(|r| r.split(',').next().unwrap()).collect();
    let svg = read(tmp.path(), "spiral.svg");
    assert_eq!(pairs.len(), 9);
    assert_eq!(svg.matches("<path").count(), pairs.len());
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [a.path(), b.path()] {
        assert_eq!(code(&run(&["predict", "--config", "builtin:quarter-cayley"], dir)), 0);
        assert_eq!(code(&run(&["build", "--config", "builtin:quarter-cayley"], dir)), 0);
    }
    for name in ["cluster1.csv", "cluster2.csv", "predicted.csv", "spiral.csv", "operator.csv", "plan.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name} differs");
    }
    // a different seed changes the hash and the sampled clusters
    let c = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["predict", "--config", "builtin:quarter-cayley", "--seed", "99"], c.path())), 0);
    assert_ne!(read(a.path(), "cluster1.csv"), read(c.path(), "cluster1.csv"));
}

#[test]
fn low_order_cap_is_a_certification_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "name = \"low\"\n[map]\npsi1 = \"i + 0.25*cay(z1)\"\npsi2 = \"i\"\n[plan]\nmax_order = 2\n[grid]\nmodel = \"modal\"\nnodes = 8\n",
    );
    let o = run(&["build", "--config", &cfg], tmp.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let plan: serde_json::Value = serde_json::from_str(&read(tmp.path(), "plan.json")).unwrap();
    assert_eq!(plan["certified"], false);
    assert_eq!(plan["n1"], 2);
    assert!(!tmp.path().join("operator.csv").exists());
}

#[test]
fn build_writes_a_certified_plan_and_crosscheck() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["build", "--config", "builtin:dilated"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let plan: serde_json::Value = serde_json::from_str(&read(tmp.path(), "plan.json")).unwrap();
    assert_eq!(plan["certified"], true);
    assert!(plan["remainder_bound"].as_f64().unwrap() <= 1e-6);
    assert_eq!(plan["dilation"], serde_json::json!([2.0, 1.5]));
    let cc: serde_json::Value = serde_json::from_str(&read(tmp.path(), "crosscheck.json")).unwrap();
    assert_eq!(cc["check"]["pass"], true);
    let side: serde_json::Value = serde_json::from_str(&read(tmp.path(), "operator.json")).unwrap();
    assert_eq!(side["rows"], 256);
    assert_eq!(data_rows(&read(tmp.path(), "operator.csv")).len(), 256);

    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["build", "--config", "builtin:dilated", "--no-crosscheck"], tmp.path())), 0);
    assert!(!tmp.path().join("crosscheck.json").exists());
}

#[test]
fn verify_passes_and_shifted_control_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--config", "builtin:constants"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS"));
    let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "report.json")).unwrap();
    assert_eq!(report["verdict"]["pass"], true);
    assert_eq!(report["config"]["name"], "constants");
    assert!(read(tmp.path(), "overlay.svg").contains(report["config_hash"].as_str().unwrap()));

    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--config", "builtin:constants-shifted"], tmp.path());
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&read(tmp.path(), "verdict.json")).unwrap();
    assert_eq!(v["verdict"]["pass"], false);
    assert!((v["verdict"]["distance"].as_f64().unwrap() - 0.5).abs() < 0.05);
}

#[test]
fn spectrum_writes_levels_for_each_eps() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--config", "builtin:constants", "--eps", "0.05,0.1"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // eigenvalues exp(-0.05 (j + 2k)) take 121 distinct values on the 41 x 41 grid
    assert_eq!(data_rows(&read(tmp.path(), "eigenvalues.csv")).len(), 121);
    assert_eq!(data_rows(&read(tmp.path(), "pseudospectrum.csv")).len(), 97 * 33);
    let (l0, l1) = (data_rows(&read(tmp.path(), "level0.csv")).len(), data_rows(&read(tmp.path(), "level1.csv")).len());
    assert!(0 < l0 && l0 <= l1);
    assert_eq!(code(&run(&["spectrum", "--config", "builtin:quarter-cayley"], tmp.path())), 2);
}

#[test]
fn demo_matches_expected_outcomes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hardy-spec"))
        .args(["demo", "--out"])
        .arg(tmp.path())
        .env("HARDY_SPEC_THREADS", "2")
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("ok")).count(), 5, "{stdout}");
}
