use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use trigen_cli::report::Report;

fn trigen(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_trigen"));
    cmd.args(args).env_remove("TRIGEN_CACHE_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SQRT2: &str = r#"{"name": "Q(sqrt2)", "coefficients": ["-2", "0", "1"]}"#;

fn sqrt2_config(r_values: &str, primes: &str, extra: &str) -> String {
    format!(
        r#"{{"fields": [{SQRT2}], "cases": [{{"field": "Q(sqrt2)", "case": "SL2_NONCM"}}],
            "r_values": {r_values}, "primes": {primes}{extra}}}"#
    )
}

fn run_ok(dir: &Path, cfg: &str, extra_args: &[&str]) -> (Report, Output) {
    let cfg = write(dir, "cfg.json", cfg);
    let out = dir.join("report.json");
    let mut args = vec!["run", s(&cfg), "--out", s(&out)];
    args.extend_from_slice(extra_args);
    let o = trigen(&args, &[]);
    (Report::load(&out).expect("report written"), o)
}

fn sl2_order(q: u64) -> u64 {
    q * (q * q - 1)
}

#[test]
fn sqrt2_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (rep, o) = run_ok(dir.path(), &sqrt2_config("[1, 2]", "[3, 5, 7]", ""), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(rep.jobs.len(), 2);
    let r1 = &rep.jobs[0];
    assert_eq!((r1.r, r1.verdict.label()), (1, "PASS"));
    // 2 is a square mod 7 only: F9, F25, F7 x F7
    let orders: Vec<u64> = r1.closures.iter().map(|c| c.subgroup_order.as_ref().unwrap().parse().unwrap()).collect();
    assert_eq!(orders, vec![sl2_order(9), sl2_order(25), sl2_order(7).pow(2)]);
    assert_eq!(r1.elementary.as_ref().unwrap().n, "2");
    assert!(r1.checks.iter().all(|c| c.passed));

    // For r = 2, theta^2 = -sqrt2 mod 3 and theta^4 = 2 lies in F3, so the
    // generators stay inside SL(2, F3) extended by h: order 24 * 2.
    let r2 = &rep.jobs[1];
    assert_eq!(r2.verdict.label(), "FAIL");
    let mod3 = &r2.closures[0];
    assert_eq!(mod3.subgroup_order.as_deref(), Some("48"));
    assert_eq!(mod3.index.as_deref(), Some("15"));
    assert!(r2.closures[1..].iter().all(|c| c.surjective.as_deref() == Some("yes")));

    let (rep, _) = run_ok(dir.path(), &sqrt2_config("[1, 2]", "[5, 7]", ""), &[]);
    assert!(rep.jobs.iter().all(|j| j.verdict.label() == "PASS"));
    assert_eq!(rep.summary.pass, 2);
}

#[test]
fn empty_cases_give_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let (rep, o) = run_ok(dir.path(), &format!(r#"{{"fields": [{SQRT2}], "cases": []}}"#), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(rep.jobs.is_empty());
}

#[test]
fn unit_rank_zero_is_reported_in_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"fields": [{"name": "Q(i)", "coefficients": ["1", "0", "1"]}],
                  "cases": [{"field": "Q(i)", "case": "SL2_NONCM"}], "primes": [3]}"#;
    let (rep, o) = run_ok(dir.path(), cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(rep.jobs[0].verdict.label(), "FAIL");
    assert!(rep.jobs[0].error.as_deref().unwrap().contains("unit rank 0"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let bad = write(dir.path(), "bad.json", r#"{"fields": [], "cases": [{"field": "K", "case": "SL2_NONCM"}]}"#);
    assert_eq!(trigen(&["run", s(&bad), "--out", s(&out)], &[]).status.code(), Some(2));
    let junk = write(dir.path(), "junk.json", "{not json");
    assert_eq!(trigen(&["run", s(&junk), "--out", s(&out)], &[]).status.code(), Some(2));
    let missing = dir.path().join("nope.json");
    assert_eq!(trigen(&["explain", s(&missing)], &[]).status.code(), Some(2));
    assert_eq!(trigen(&["explain", s(&junk)], &[]).status.code(), Some(2));

    // a closure cut off by its cap is a resource abort; the report is still written
    let cfg = sqrt2_config("[1]", "[7]", r#", "caps": {"closure": 100}"#);
    let (rep, o) = run_ok(dir.path(), &cfg, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(rep.jobs[0].verdict.label(), "UNKNOWN");
    let text = String::from_utf8(trigen(&["explain", s(&dir.path().join("report.json"))], &[]).stdout).unwrap();
    assert!(text.contains("UNKNOWN (cap)"), "{text}");
}

#[test]
fn explain_pass_table() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(dir.path(), &sqrt2_config("[1]", "[3, 5]", ""), &[]);
    let o = trigen(&["explain", s(&dir.path().join("report.json"))], &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("✓ PASS") && text.contains("✓ 720") && text.contains("✓ 15600"), "{text}");
    assert!(text.contains("1 pass, 0 fail, 0 unknown"));
}

#[test]
fn warm_cache_is_deterministic_and_survives_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cfg = sqrt2_config("[1, 2]", "[3, 5]", "");
    let args = ["--cache", s(&cache), "--jobs", "1"];
    let (cold, _) = run_ok(dir.path(), &cfg, &args);
    // the second r value reuses the theta certificate of the first
    assert_eq!(cold.timings.cache_hits, 1);
    let (warm, _) = run_ok(dir.path(), &cfg, &args);
    assert!(warm.timings.cache_hits >= 4, "{:?}", warm.timings);
    let bytes = |r: &Report| serde_json::to_string_pretty(&r.without_timings()).unwrap();
    assert_eq!(bytes(&cold), bytes(&warm));

    for entry in std::fs::read_dir(&cache).unwrap() {
        let p = entry.unwrap().path();
        let text = std::fs::read(&p).unwrap();
        std::fs::write(&p, &text[..text.len() / 3]).unwrap();
    }
    let (recomputed, _) = run_ok(dir.path(), &cfg, &args);
    assert_eq!(recomputed.timings.cache_hits, 1);
    assert_eq!(bytes(&cold), bytes(&recomputed));
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let env_cache = dir.path().join("env-cache");
    let cfg = write(dir.path(), "cfg.json", &sqrt2_config("[1]", "[3]", ""));
    let out = dir.path().join("r.json");
    let o = trigen(&["run", s(&cfg), "--out", s(&out)], &[("TRIGEN_CACHE_DIR", &env_cache)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_dir(&env_cache).unwrap().count() >= 2);
}

#[test]
fn job_count_does_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        r#"{{"fields": [{SQRT2}, {{"name": "Q(sqrt3)", "coefficients": ["-3", "0", "1"]}}],
            "cases": [{{"field": "Q(sqrt3)", "case": "SL2_NONCM"}}, {{"field": "Q(sqrt2)", "case": "SL2_NONCM"}}],
            "r_values": [1, 2, 3], "primes": [5]}}"#
    );
    let (a, _) = run_ok(dir.path(), &cfg, &["--jobs", "1"]);
    let (b, _) = run_ok(dir.path(), &cfg, &["--jobs", "4"]);
    assert_eq!(a.without_timings(), b.without_timings());
    let order: Vec<(&str, u32)> = a.jobs.iter().map(|j| (j.field.as_str(), j.r)).collect();
    assert_eq!(order[0], ("Q(sqrt3)", 1));
    assert_eq!(order[5], ("Q(sqrt2)", 3));
}

#[test]
fn field_info_lists_theta_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", &format!(r#"{{"fields": [{SQRT2}], "r_max": 3}}"#));
    let o = trigen(&["field-info", s(&cfg), "--field", "Q(sqrt2)"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("signature (2, 0)") && text.contains("unit rank 1"), "{text}");
    assert!(text.contains("r =  3  index 5"), "{text}");
    let o = trigen(&["field-info", s(&cfg), "--field", "K"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shipped_configs_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = trigen(&["run", s(&root.join("showcase.json")), "--out", s(&out)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = Report::load(&out).unwrap();
    let labels: Vec<&str> = rep.jobs.iter().map(|j| j.verdict.label()).collect();
    assert_eq!(labels, vec!["PASS", "PASS", "PASS", "PASS", "PASS", "PASS", "FAIL"]);
}
