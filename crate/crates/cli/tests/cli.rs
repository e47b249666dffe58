use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_concave-skew"))
}

fn ref_config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/ref.cfg")
}

fn run(args: &[&str]) -> Output {
    bin().arg("--config").arg(ref_config()).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn words_of_length_four() {
    let o = run(&["words", "--n", "4"]);
    assert!(o.status.success());
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().all(|r| r[0].len() == 4 && r[1] == "true"));
    assert!(!rows.iter().any(|r| r[0] == "1111"));
    let all = csv_rows(&run(&["words", "--n", "4", "--all"]));
    assert_eq!(all.len(), 16);
    assert_eq!(all.iter().find(|r| r[0] == "1111").unwrap()[1..], ["false", ""]);
}

#[test]
fn entropy_rows_are_non_increasing() {
    let o = run(&["entropy", "--n", "12"]);
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 12);
    let h: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(h.windows(2).all(|p| p[1] <= p[0]));
    assert_eq!(rows[3][1], "15");
}

#[test]
fn reruns_are_byte_identical() {
    for args in [&["join", "--samples", "50", "--pairs", "10"][..], &["twins", "--max-len", "6"], &["bifscan", "--t-steps", "5", "--n", "8"]] {
        let a = run(args);
        let b = bin()
            .env("CONCAVE_SKEW_WORKERS", "1")
            .arg("--config")
            .arg(ref_config())
            .args(args)
            .output()
            .unwrap();
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_envelope_is_deterministic_apart_from_timestamp() {
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(v["timestamp"].is_string());
        v.as_object_mut().unwrap().remove("timestamp");
        v
    };
    let a = strip(run(&["--json", "horseshoe"]));
    let b = strip(run(&["--json", "horseshoe"]));
    assert_eq!(a, b);
    assert_eq!(a["command"], "horseshoe");
    assert_eq!(a["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(a["rows"][0]["s"], 8);
}

#[test]
fn seed_changes_config_hash_only() {
    let a = run(&["--json", "join", "--samples", "20", "--pairs", "5"]);
    let b = run(&["--json", "--seed", "9", "join", "--samples", "20", "--pairs", "5"]);
    let (a, b): (serde_json::Value, serde_json::Value) =
        (serde_json::from_slice(&a.stdout).unwrap(), serde_json::from_slice(&b.stdout).unwrap());
    assert_ne!(a["config_hash"], b["config_hash"]);
    assert_eq!(a["rows"][0]["n1"], b["rows"][0]["n1"]);
}

#[test]
fn config_errors_exit_two() {
    let dir = std::env::temp_dir().join(format!("concave-skew-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.cfg");
    std::fs::write(&bad, "[maps]\nf1 = moebius(A=2, B=0, d=0.4)\n").unwrap();
    let o = bin().arg("--config").arg(&bad).args(["words", "--n", "3"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().arg("--config").arg(&bad).args(["--force", "words", "--n", "3"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    // the report itself is a failed verification
    let o = bin().arg("--config").arg(&bad).arg("hypotheses").output().unwrap();
    assert_eq!(o.status.code(), Some(1));

    std::fs::write(&bad, "[maps]\nf0 = tent(c=1)\n").unwrap();
    let o = bin().arg("--config").arg(&bad).arg("hypotheses").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().arg("--config").arg(dir.join("missing.cfg")).arg("hypotheses").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().env("CONCAVE_SKEW_WORKERS", "zero").arg("hypotheses").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_path_receives_the_body() {
    let path = std::env::temp_dir().join(format!("concave-skew-out-{}.csv", std::process::id()));
    let o = run(&["--output", path.to_str().unwrap(), "entropy", "--n", "3"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.starts_with("n,count,entropy_upper\n1,2,"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn orbit_and_saddle_node() {
    let rows = csv_rows(&run(&["orbit", "--word", "1000"]));
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][2].as_str(), rows[1][2].as_str()), ("plus", "minus"));
    let o = run(&["orbit", "--word", "1111"]);
    assert_eq!(o.status.code(), Some(2));
    let rows = csv_rows(&run(&["saddle-node", "--family", "reference", "--word", "10"]));
    let t: f64 = rows[0][1].parse().unwrap();
    assert!((t - 0.114935).abs() < 1e-5);
    assert_eq!(rows[0][2], "parabolic");
}

#[test]
fn verify_table_matches_exit_status() {
    let o = run(&["verify"]);
    let rows = csv_rows(&o);
    assert!(rows.len() >= 11);
    let any_fail = rows.iter().any(|r| r[1] == "FAIL");
    assert_eq!(o.status.code(), Some(if any_fail { 1 } else { 0 }));
    for id in ["1", "2", "3", "5", "6", "8", "9", "11"] {
        assert_eq!(rows.iter().find(|r| r[0] == id).unwrap()[1], "PASS", "{}", stdout(&o));
    }
}
