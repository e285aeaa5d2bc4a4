use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_solitonic"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg(sub).arg("--config").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// CSV rows after the provenance comment line.
fn csv_rows(path: &Path) -> (String, Vec<csv::StringRecord>) {
    let text = std::fs::read_to_string(path).unwrap();
    let (head, body) = text.split_once('\n').unwrap();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    (head.to_string(), r.records().map(|x| x.unwrap()).collect())
}

#[test]
fn kac_table_has_level_two_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "kac.json", r#"{"c": [0.5, 1.0], "h": [0.0, 0.0625, 0.5], "max_level": 4}"#);
    let out = dir.path().join("kac.csv");
    let o = run("kac", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (head, rows) = csv_rows(&out);
    assert!(head.starts_with("# tool=solitonic") && head.contains("config_sha256=") && head.contains("seed=0"));
    assert_eq!(rows.len(), 2 * 3 * 4);
    for r in &rows {
        let (c, h, level, det): (f64, f64, usize, f64) =
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap(), r[3].parse().unwrap());
        if c == 0.5 && (h == 0.0625 || h == 0.5) && level == 2 {
            assert!(det.abs() < 1e-10, "{c} {h} {det}");
        }
    }
}

#[test]
fn classifier_groups_by_r() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sol.json",
        r#"{"solitons": [
            {"id": "trivial", "minus": {"type": "identity"}, "plus": {"type": "identity"}},
            {"id": "psi", "minus": {"type": "identity"}, "plus": {"type": "dilation", "t": 0.5}},
            {"id": "shifted", "minus": {"type": "dilation", "t": 0.2}, "plus": {"type": "dilation", "t": 0.7}}
        ]}"#,
    );
    let out = dir.path().join("sol.csv");
    let o = run("soliton-classify", &cfg, &out, &["--threads", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    let reps: Vec<&str> = rows.iter().map(|r| &r[3]).collect();
    assert_eq!(reps, ["trivial", "psi", "psi"]);
    let proper: Vec<&str> = rows.iter().map(|r| &r[2]).collect();
    assert_eq!(proper, ["false", "true", "true"]);
    let r: f64 = rows[1][1].parse().unwrap();
    assert!((r - (-0.5f64).exp()).abs() < 1e-12);
}

#[test]
fn qei_constant_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "qei.json", r#"{"c": 1.0, "N": 6, "field": {"cos": [1.0]}, "trials": 20}"#);
    let out = dir.path().join("qei.json.out");
    let o = run("qei", &cfg, &out, &["--seed", "11"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["meta"]["seed"], 11);
    let bound = v["report"]["bound"].as_f64().unwrap();
    assert!((bound + 1.0 / 48.0).abs() < 1e-12);
    assert!(v["report"]["min_gap"].as_f64().unwrap() >= 0.0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "w.json",
        r#"{"modes": [1, 2], "n_max": 14, "f": {"cos": [0.0, 0.3], "sin": [0.1, 0.2]}, "g": {"sin": [0.4]}, "seed": 5}"#,
    );
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert!(run("weyl-check", &cfg, &a, &[]).status.success());
    assert!(run("weyl-check", &cfg, &b, &[]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v = json(&a);
    assert_eq!(v["meta"]["seed"], 5);
    assert!(v["report"]["covariance"].as_f64().unwrap() < 1e-6);
}

#[test]
fn lambda_decay_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "l.json", r#"{"map": {"type": "rotation", "alpha": 0.4}, "s": 2.4, "pmax": 12}"#);
    let out = dir.path().join("l.out.json");
    let o = run("lambda-decay", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&out)["report"]["sup_weighted"].as_f64().unwrap(), 0.0);
    let (_, rows) = csv_rows(&dir.path().join("l.out.csv"));
    assert!(!rows.is_empty());
}

#[test]
fn hs_sweep_single_cutoff_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "h.json", r#"{"map": {"type": "psi_t", "t": 0.5}, "cutoffs": [16]}"#);
    let out = dir.path().join("h.out");
    assert!(run("hs-sweep", &cfg, &out, &[]).status.success());
    assert_eq!(json(&out)["report"]["verdict"], "inconclusive");
}

#[test]
fn commutator_residual_is_small() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"c": 0.5, "h": 0.0, "N": 8, "f": {"cos": [0.0, 1.0]}, "g": {"sin": [0.0, 1.0]}}"#,
    );
    let out = dir.path().join("c.out");
    assert!(run("commutator", &cfg, &out, &[]).status.success());
    assert!(json(&out)["report"]["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.out");
    let bad = write(dir.path(), "bad.json", "{not json");
    let o = run("kac", &bad, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed JSON"));
    let unknown = write(dir.path(), "u.json", r#"{"map": {"type": "shear"}, "s": 2.0, "pmax": 8}"#);
    assert_eq!(run("lambda-decay", &unknown, &out, &[]).status.code(), Some(2));
    let invalid = write(
        dir.path(),
        "i.json",
        r#"{"solitons": [{"id": "a", "minus": {"type": "identity"}, "plus": {"type": "rotation", "alpha": 0.3}}]}"#,
    );
    assert_eq!(run("soliton-classify", &invalid, &out, &[]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(run("kac", &missing, &out, &[]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn thread_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "k.json", r#"{"c": [0.5], "h": [0.0], "max_level": 2}"#);
    let o = bin()
        .args(["kac", "--config"])
        .arg(&cfg)
        .env("SOLITONIC_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["kac", "--config"]).arg(&cfg).env("SOLITONIC_THREADS", "1").output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("level"));
}
