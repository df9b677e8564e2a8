use crate::report::{PrimeReport, PrimeStatus, Report};
use trigen_core::Verdict;

fn prime_cell(p: &PrimeReport) -> String {
    match p.status {
        PrimeStatus::Skipped => "skipped".into(),
        PrimeStatus::Error if p.resource => "UNKNOWN (cap)".into(),
        PrimeStatus::Error => "error".into(),
        PrimeStatus::Ok => match p.surjective.as_deref() {
            Some("yes") => format!("✓ {}", p.subgroup_order.as_deref().unwrap_or("?")),
            Some("no") => format!("✗ index {}", p.index.as_deref().unwrap_or("?")),
            _ => "UNKNOWN (cap)".into(),
        },
    }
}

fn verdict_cell(v: &Verdict) -> String {
    match v {
        Verdict::Pass => "✓ PASS".into(),
        Verdict::Fail { component } => format!("✗ FAIL ({component})"),
        Verdict::Unknown { reason } if reason.contains("cap") => "UNKNOWN (cap)".into(),
        Verdict::Unknown { .. } => "UNKNOWN".into(),
    }
}

/// A plain-text table with one row per job and one column per prime.
pub fn explain(report: &Report) -> String {
    let mut primes: Vec<u32> = report.jobs.iter().flat_map(|j| j.closures.iter().map(|c| c.p)).collect();
    primes.sort_unstable();
    primes.dedup();

    let mut header = vec!["field".to_string(), "case".into(), "r".into(), "verdict".into()];
    header.extend(primes.iter().map(|p| format!("mod {p}")));
    let mut rows = vec![header];
    for j in &report.jobs {
        let mut row = vec![j.field.clone(), j.case.to_string(), j.r.to_string(), verdict_cell(&j.verdict)];
        for p in &primes {
            row.push(j.closures.iter().find(|c| c.p == *p).map(prime_cell).unwrap_or_else(|| "-".into()));
        }
        rows.push(row);
    }
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell}{}", " ".repeat(w - cell.chars().count())))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
            out.push('\n');
        }
    }
    for j in &report.jobs {
        if let Some(e) = &j.error {
            out.push_str(&format!("{} {} r={}: {e}\n", j.field, j.case, j.r));
        }
        for c in j.checks.iter().filter(|c| !c.passed) {
            out.push_str(&format!("{} {} r={}: check {} failed: {}\n", j.field, j.case, j.r, c.name, c.detail));
        }
    }
    let s = &report.summary;
    out.push_str(&format!("{} pass, {} fail, {} unknown\n", s.pass, s.fail, s.unknown));
    out
}
