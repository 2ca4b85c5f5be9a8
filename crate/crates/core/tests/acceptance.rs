//! Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned.

use std::time::{Duration, Instant};

use eis_heights::arith;
use eis_heights::checks::{self, CheckOptions, CONDUCTOR_DELTAS};
use eis_heights::{CheckReport, CheckStatus};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    summary: String,
}

/// Every report must pass; inconclusive oracles count as failures.
fn summarize(reports: &[CheckReport], tol: &str) -> Outcome {
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| r.status != CheckStatus::Pass).collect();
    let max_rel = reports
        .iter()
        .filter(|r| r.exact.is_none())
        .map(|r| r.rel_residual)
        .fold(0.0f64, f64::max);
    let exact = reports.iter().filter(|r| r.exact.is_some()).count();
    let mut summary = format!(
        "{} comparisons ({} exact), max rel residual {:.2e}, tolerance {}",
        reports.len(),
        exact,
        max_rel,
        tol
    );
    if let Some(first) = failed.first() {
        summary.push_str(&format!("; {} failing, first: {}", failed.len(), first));
    }
    Outcome {
        passed: failed.is_empty() && !reports.is_empty(),
        summary,
    }
}

fn named(reports: &[CheckReport], names: &[&str]) -> Vec<CheckReport> {
    reports.iter().filter(|r| names.contains(&r.name.as_str())).cloned().collect::<Vec<_>>()
}

fn param<'a>(r: &'a CheckReport, key: &str) -> Option<&'a str> {
    r.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn criterion_1() -> Outcome {
    let grid = checks::main_identity_grid(false);
    let reports = checks::main_identity_reports(&grid);
    summarize(&reports, "rel 1e-9")
}

fn criterion_2() -> Outcome {
    summarize(&checks::degree_identity_reports(200), "exact")
}

fn criterion_3() -> Outcome {
    summarize(&checks::hurwitz_bridge_reports(200), "exact")
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let all = checks::local_density_suite(&CheckOptions { quick: false, prime: None });
    let elapsed = start.elapsed();
    let reports = named(&all, &["local_density", "p2_subcase"]);
    let mut out = summarize(&reports, "exact");
    let subcases: Vec<&str> = reports
        .iter()
        .filter(|r| r.name == "p2_subcase")
        .filter_map(|r| param(r, "subcase"))
        .collect();
    let covered = ["1", "2", "3"].iter().all(|c| subcases.contains(c));
    let in_time = elapsed <= Duration::from_secs(300);
    out.passed &= covered && in_time;
    out.summary.push_str(&format!(
        "; p=2 subcases 1-3 covered: {covered}; runtime {:.1}s (limit 300s)",
        elapsed.as_secs_f64()
    ));
    out
}

fn criterion_5() -> Outcome {
    let reports = checks::conductor_reports(500);
    let mut out = summarize(&reports, "exact per log p, rel 1e-10");
    let mut seen = std::collections::BTreeSet::new();
    for &delta in &CONDUCTOR_DELTAS {
        for p in [2i64, 3, 5] {
            seen.insert((p, arith::kronecker(delta, p).unwrap()));
        }
    }
    let all_chi = seen.len() == 9;
    let has_eta = reports.iter().any(|r| r.name == "conductor_eta_identity");
    out.passed &= all_chi && has_eta;
    out.summary.push_str(&format!("; chi in {{-1,0,1}} at p=2,3,5 covered: {all_chi}"));
    out
}

fn criterion_6() -> Outcome {
    let mut reports = Vec::new();
    for p in [2u64, 3, 5, 7] {
        for k in 0..=6 {
            for chi in -1..=1 {
                for on_d in [false, true] {
                    reports.extend(checks::b_poly_reports(p, k, chi, on_d));
                }
            }
        }
    }
    summarize(&named(&reports, &["b_p_value_at_zero", "b_p_log_derivative"]), "exact")
}

fn criterion_7() -> Outcome {
    let reports = checks::tree_reports();
    let mut out = summarize(&reports, "exact");
    let cases = ["tree_inert", "tree_ramified", "tree_split"]
        .iter()
        .all(|n| reports.iter().any(|r| r.name == *n));
    out.passed &= cases;
    out
}

fn criterion_8() -> Outcome {
    let reports = checks::functional_suite(&CheckOptions::default());
    let mut out = summarize(&reports, "b_p exact; Lambda 1e-9; A_m 1e-8; Psi 1e-9");
    let lambda = reports.iter().filter(|r| r.name == "lambda_functional_equation").count();
    out.passed &= lambda >= 30;
    out.summary.push_str(&format!("; Lambda grid points: {lambda}"));
    out
}

fn criterion_9() -> Outcome {
    let reports = checks::constant_term_ledger_reports();
    let mut out = summarize(&reports, "1e-11");
    let modular = reports
        .iter()
        .any(|r| r.name == "constant_term_modular_curve" && r.passed());
    out.passed &= modular;
    out
}

fn criterion_10() -> Outcome {
    let mut reports = checks::class_number_formula_reports(400);
    reports.extend(checks::regulator_reports(200));
    summarize(&reports, "rel 1e-10")
}

fn main() {
    let total = Instant::now();
    let criteria: [Criterion; 10] = [
        ("main identity: height pairing = derivative, |m|<=120, 3 v, 10 D", criterion_1),
        ("degree identity and constant term, m<=200", criterion_2),
        ("Hurwitz bridge 2 H_0(m;1) = H(4m), m<=200", criterion_3),
        ("local densities: counting oracle = closed form", criterion_4),
        ("conductor sums and eta_p identity, n<=500", criterion_5),
        ("b_p derivatives by polynomial calculus, p<=7, k<=6", criterion_6),
        ("tree multiplicities vs closed forms, p<=7, k<=6", criterion_7),
        ("functional equations", criterion_8),
        ("constant-term ledger", criterion_9),
        ("class numbers and regulators", criterion_10),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        all &= o.passed;
        println!(
            "{} [{}] {}: {} ({:.1}s)",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            name,
            o.summary,
            start.elapsed().as_secs_f64()
        );
    }
    let secs = total.elapsed().as_secs_f64();
    let in_budget = secs <= 900.0;
    println!(
        "{} total runtime {:.1}s (budget 900s)",
        if in_budget { "PASS" } else { "FAIL" },
        secs
    );
    if !(all && in_budget) {
        std::process::exit(1);
    }
}
