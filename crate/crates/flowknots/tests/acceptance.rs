//! Acceptance criteria 1 to 10, one PASS/FAIL line each.
//!
//! Runs the full budget by default. `FLOWKNOTS_ACCEPTANCE_BUDGET=small` gives
//! a quick smoke run with smaller samples.

use std::process::ExitCode;

use flowknots::selftest::{Budget, Suite};

fn main() -> ExitCode {
    let budget = match std::env::var("FLOWKNOTS_ACCEPTANCE_BUDGET") {
        Ok(s) => s.parse().unwrap_or_else(|e| panic!("{e}")),
        Err(_) => Budget::Full,
    };
    let suite = Suite::new(budget);
    println!("acceptance suite, {budget:?} budget");
    let mut failed = 0;
    for id in 1..=10 {
        let r = suite.run(id);
        println!("{} criterion {}: {} ({:.1}s)", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.seconds);
        for d in &r.details {
            println!("    {d}");
        }
        failed += usize::from(!r.passed);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
