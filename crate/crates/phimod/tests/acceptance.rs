//! Acceptance criteria 1–9 at full size. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

use std::process::ExitCode;

use phimod::verify::{run_suite, Suite, VerifyConfig};
use phimod::Execution;

const SHOWN_FAILURES: usize = 10;

fn main() -> ExitCode {
    // A name filter that matches nothing here comes from `cargo test <filter>`.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str()) || a.starts_with("criterion")) {
        return ExitCode::SUCCESS;
    }
    let mut all_ok = true;
    run_suite(Suite::All, &VerifyConfig::default(), Execution::default(), |n, r| {
        let ok = r.passed();
        all_ok &= ok;
        println!(
            "criterion {n}: {} ({}, {} cases, {} failures, {:.2}s{})",
            if ok { "PASS" } else { "FAIL" },
            r.name,
            r.cases,
            r.failures.len(),
            r.elapsed.as_secs_f64(),
            r.budget.map(|b| format!(" of {}s", b.as_secs())).unwrap_or_default()
        );
        for f in r.failures.iter().take(SHOWN_FAILURES) {
            println!("    {f}");
        }
        if r.failures.len() > SHOWN_FAILURES {
            println!("    ... {} more", r.failures.len() - SHOWN_FAILURES);
        }
    });
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
