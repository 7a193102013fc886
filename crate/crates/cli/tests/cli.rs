use std::process::{Command, Output};

fn condcodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condcodes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn concat_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = condcodes(&["concat", "--seed", "17", "--trials", "300", "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("experiment,metric,value,ci_low,ci_high,trials,seed\n"));
    assert!(text.contains("concat-sim,block_error_rate,"));
}

#[test]
fn zero_trial_duality_is_empty_and_succeeds() {
    let out = condcodes(&["duality", "--trials", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim_end(), "experiment,metric,value,ci_low,ci_high,trials,seed");
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("verify.json");
    let json = r#"{
        "experiment": "verify-condenser",
        "condenser": {"n": 6, "d": 0, "r": 6, "construction": "truncation"},
        "entropy": 3,
        "sources": 5
    }"#;
    std::fs::write(&cfg, json).unwrap();
    let out = condcodes(&["verify", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let eps: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(eps.len(), 6);
    assert!(eps.iter().all(|&v| v == "0"));
}

#[test]
fn mismatched_or_invalid_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"experiment": "duality-scan"}"#).unwrap();
    let out = condcodes(&["verify", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    std::fs::write(&cfg, r#"{"experiment": "concat-sim", "trials": 3}"#).unwrap();
    let out = condcodes(&["concat", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("needs \"code\""));
}

#[test]
fn suite_filter_runs_one_claim() {
    let out = condcodes(&["suite", "--filter", "lemma11"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let verdicts: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert_eq!(verdicts.len(), 1);
    assert!(verdicts[0].contains("lemma11"));
}

#[test]
fn sabotaged_rank_repair_exits_nonzero() {
    let ok = condcodes(&["suite", "--filter", "rank-repair"]);
    assert!(ok.status.success());
    let bad = condcodes(&["suite", "--filter", "rank-repair", "--sabotage"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).starts_with("FAIL"));
}
