//! Runs the twelve acceptance criteria and prints one line per criterion.
//! Built without the libtest harness so the lines always reach the console.

use std::process::ExitCode;

use sievelab::suite;

fn main() -> ExitCode {
    let reports = suite::run_all();
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", reports.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
