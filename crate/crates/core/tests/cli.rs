use std::path::Path;
use std::process::{Command, Output};

use twistrec::reciprocity::VerificationReport;

fn twistrec(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistrec")).args(args).env("TWISTREC_CACHE_DIR", cache).output().expect("spawn twistrec")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn theorem1_json_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = twistrec(&["verify-theorem1", "--weight", "12", "--p", "3", "--q", "7", "--r", "5", "--digits", "30"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rep: VerificationReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rep.residual_f64() < 1e-20);
    assert!(rep.wall_ms.is_none());
    assert_eq!(rep.moments.len(), 3);
    assert_eq!(rep.terms.len(), 5);
}

#[test]
fn composite_modulus_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = twistrec(&["verify-theorem1", "--weight", "12", "--p", "3", "--q", "9", "--r", "5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains('9'));
}

#[test]
fn unsupported_weight_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = twistrec(&["tau-table", "--weight", "14", "--n", "5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tau_table_matches_known_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = twistrec(&["tau-table", "--weight", "12", "--n", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let body = stdout(&o);
    let values: Vec<i64> = body.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values, vec![1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]);
    // served from the cache on the second call
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 1);
    assert_eq!(stdout(&twistrec(&["tau-table", "--weight", "12", "--n", "10"], dir.path())), body);
}

#[test]
fn report_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = twistrec(
        &["verify-theorem1", "--weight", "16", "--p", "5", "--q", "3", "--r", "7", "--report", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let rep: VerificationReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let recomputed = rep.recompute_residual().unwrap().to_f64();
    assert!((recomputed - rep.residual_f64()).abs() <= 1e-3 * rep.residual_f64().max(1e-60));
    assert!(recomputed < 1e-20);
}

#[test]
fn output_is_deterministic_without_timings() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify-theorem1", "--weight", "18", "--p", "11", "--q", "3", "--r", "13"];
    let a = twistrec(&args, dir.path());
    let b = twistrec(&args, dir.path());
    assert_eq!(a.stdout, b.stdout);
    let mut timed = vec!["--timings"];
    timed.extend_from_slice(&args);
    let t: VerificationReport = serde_json::from_str(&stdout(&twistrec(&timed, dir.path()))).unwrap();
    assert!(t.wall_ms.is_some());
}

#[test]
fn batch_keeps_case_then_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("batch.json");
    std::fs::write(
        &cfg,
        r#"{"cases":[{"identity":"corollary","weight":16,"p":5,"q":3}],
            "grid":{"identity":"theorem1","weights":[12],"primes":[3,5,7]}}"#,
    )
    .unwrap();
    let o = twistrec(&["--format", "csv", "batch", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let body = stdout(&o);
    let rows: Vec<Vec<String>> = body.lines().skip(1).map(|l| l.split(',').take(5).map(String::from).collect()).collect();
    let keys: Vec<String> = rows.iter().map(|r| r.join(",")).collect();
    assert_eq!(
        keys,
        [
            "corollary,16,5,3,1",
            "theorem1,12,3,5,7",
            "theorem1,12,3,7,5",
            "theorem1,12,5,3,7",
            "theorem1,12,5,7,3",
            "theorem1,12,7,3,5",
            "theorem1,12,7,5,3"
        ]
    );
    assert!(body.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn batch_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("batch.json");
    std::fs::write(&cfg, r#"{"cases":[], "precision": 40}"#).unwrap();
    let o = twistrec(&["batch", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn transforms_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = twistrec(&["verify-transforms", "--which", "residue"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let body = stdout(&o);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("case,lhs,rhs,residual,tolerance,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orth.txt");
    let o = twistrec(&["--output", out.to_str().unwrap(), "verify-orthogonality", "--q", "11", "--m", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(!std::fs::read_to_string(&out).unwrap().is_empty());
}

#[test]
fn eval_ltwist_text() {
    let dir = tempfile::tempdir().unwrap();
    let o = twistrec(&["eval-ltwist", "--weight", "12", "--a", "-2", "--b", "7", "--s-re", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).trim().is_empty());
}
