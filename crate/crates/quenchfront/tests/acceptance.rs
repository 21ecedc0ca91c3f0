//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit on any failure.

use std::process::ExitCode;

use quenchfront::acceptance::{Context, Options, TITLES};

fn main() -> ExitCode {
    let ctx = Context::new(Options::default());
    let mut failed = Vec::new();
    for id in 1..=TITLES.len() as u8 {
        let outcome = ctx.run(id);
        println!("{outcome}");
        if !outcome.passed {
            failed.push(id);
        }
    }
    println!(
        "\nacceptance: {} passed, {} failed {:?}",
        TITLES.len() - failed.len(),
        failed.len(),
        failed
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
