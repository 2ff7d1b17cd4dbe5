//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so the lines are always shown; the
//! process exits nonzero if any criterion fails.

use polyspec::acceptance::{run_criterion, CRITERIA, DEFAULT_SEED};

fn main() {
    println!("acceptance suite, seed {DEFAULT_SEED}");
    let mut failed = Vec::new();
    for id in 1..=CRITERIA {
        let outcome = run_criterion(id, DEFAULT_SEED);
        println!("{}", outcome.line());
        if !outcome.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all {CRITERIA} criteria passed");
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
