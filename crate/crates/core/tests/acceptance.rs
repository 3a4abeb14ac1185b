//! Acceptance criteria: one line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use hhp_core::suite::{run_suite, DEFAULT_SEED};

fn main() -> ExitCode {
    let start = Instant::now();
    let outcomes = run_suite(DEFAULT_SEED);
    println!();
    println!("acceptance criteria (seed {DEFAULT_SEED})");
    for c in &outcomes {
        println!("{}", c.summary());
        for note in &c.notes {
            println!("       note: {note}");
        }
    }
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    println!(
        "{} passed, {failed} failed in {:.2?}",
        outcomes.len() - failed,
        start.elapsed()
    );
    assert_eq!(outcomes.len(), 11);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
