//! The twelve acceptance criteria, one PASS/FAIL line each. Runs without
//! the libtest harness so the lines are always printed.

use std::process::ExitCode;

use modelopt::harness::{run_suite, Suite};

fn main() -> ExitCode {
    let results = run_suite(Suite::All, |r| println!("{r}"));
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("acceptance: {} passed, {} failed", results.len() - failed.len(), failed.len());
    if results.len() == 12 && failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
