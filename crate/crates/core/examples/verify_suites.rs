//! Run every built-in verification suite with a fixed seed.

use qubit_align::sweep::{run_suite, Suite};

fn main() {
    let mut ok = true;
    for suite in Suite::ALL {
        let report = run_suite(suite, 2000, 42).unwrap();
        print!("{}", report.summary());
        ok &= report.passed();
    }
    std::process::exit(if ok { 0 } else { 1 });
}
