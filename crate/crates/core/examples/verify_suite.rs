//! Runs one acceptance suite (default: all) and prints PASS/FAIL lines.

use modelopt::harness::{run_suite, Suite};

fn main() {
    let suite: Suite = std::env::args().nth(1).as_deref().unwrap_or("all").parse().expect("unknown suite");
    let results = run_suite(suite, |r| println!("{r}"));
    if results.iter().any(|r| !r.passed) {
        std::process::exit(1);
    }
}
