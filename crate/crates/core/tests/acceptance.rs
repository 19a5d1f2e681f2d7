//! Runs the ten acceptance criteria and prints one pass/fail line for each.

use std::process::ExitCode;

use eis_core::verify::run_criterion;

fn main() -> ExitCode {
    let mut failed = 0;
    for id in 1..=10u8 {
        let report = run_criterion(id);
        println!("{report}");
        if !report.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
