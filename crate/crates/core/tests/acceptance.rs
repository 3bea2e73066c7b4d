//! Runs the full acceptance suite and prints one line per criterion.
//!
//! Criterion 11 is known to fail: for the l_1 norm E‖X‖ is a sum of
//! one-dimensional expectations, X and Y have the same marginals, and the
//! two moments coincide exactly, so no finite sample separates them. The
//! line still prints FAIL; the run only fails on unexpected failures.
//!
//! Runs without the libtest harness so the lines are never captured.

use lpneg::acceptance::{run_suite, SuiteOptions};

const KNOWN_FAILURES: &[u32] = &[11];

fn main() {
    let quick = std::env::var("LPNEG_ACCEPTANCE_QUICK").is_ok_and(|v| v == "1");
    let report = run_suite(&SuiteOptions { quick, fault: None });
    for c in &report.criteria {
        println!(
            "{} [{:>2}] {} ({:.1} s): {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.elapsed.as_secs_f64(),
            c.detail
        );
    }
    let unexpected: Vec<u32> = report
        .failed()
        .iter()
        .map(|c| c.id)
        .filter(|id| !KNOWN_FAILURES.contains(id))
        .collect();
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
