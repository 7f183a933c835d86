//! Runs every numbered check and prints one line per check. Exits nonzero
//! if any of them fails.

use std::process::ExitCode;

use homometry_core::checks::{checks, run_check};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for c in checks() {
        let r = run_check(c.id).expect("registered id");
        println!("{} ({:.2}s)", r.line(), r.seconds);
        for n in &r.notes {
            println!("       note: {n}");
        }
        if !r.pass {
            failed.push(r.id);
        }
    }
    println!(
        "acceptance: {} passed, {} failed{}",
        checks().len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" ({failed:?})") }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
