//! Runs every acceptance criterion and prints one line per criterion.
//! Exits non-zero if any criterion fails or a negative control passes.

use std::process::ExitCode;

use treentropy_cli::acceptance::{run_criterion, run_suite, Options, CRITERIA};

fn main() -> ExitCode {
    let opts = Options::default();
    let mut ok = true;
    for c in &CRITERIA {
        let r = run_criterion(c, &opts);
        println!("{}", r.line());
        ok &= r.pass;
    }

    // an impossible band must fail
    let control = Options {
        schutt_band: 1.0,
        ..opts.clone()
    };
    let r = run_suite("schutt-band", &control).expect("known criterion");
    let rejected = !r.pass();
    println!(
        "[{}] negative control: schutt-band with band 1 {}",
        if rejected { "PASS" } else { "FAIL" },
        if rejected { "fails as it should" } else { "passed" }
    );
    ok &= rejected;

    let empty = run_suite("", &opts).expect("empty suite");
    let vacuous = empty.pass() && empty.reports.is_empty() && empty.warning.is_some();
    println!(
        "[{}] empty suite passes vacuously with a warning",
        if vacuous { "PASS" } else { "FAIL" }
    );
    ok &= vacuous;

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
