//! Runs the cheap verification suites and prints their reports. The
//! Monte Carlo suites are available through `permsync verify`.

use permsync::analysis::suites::{hungarian_suite, invariants_suite, prop31_suite, prop42_suite};

fn main() -> permsync::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let reports = [
        hungarian_suite(seed, 100)?,
        prop31_suite(seed, 10)?,
        prop42_suite(seed, 10)?,
        invariants_suite(seed)?,
    ];
    for r in reports {
        println!("{}: {}", r.suite, r.outcome);
        for line in &r.lines {
            println!("    {line}");
        }
    }
    Ok(())
}
