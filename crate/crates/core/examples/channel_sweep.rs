//! Amplitude damping over a grid of damping strengths, written as CSV to standard output.

use std::io;

use qubit_align::channels::ChannelTemplate;
use qubit_align::sweep::{run_sweep, write_csv, Reference, StateFamily, SweepSpec};

fn main() {
    let spec = SweepSpec {
        channel: ChannelTemplate::parse("ad").unwrap(),
        param: "g:0:1:11".parse().unwrap(),
        family: StateFamily::angles_preset(),
        reference: Reference::Input,
    };
    let rows = run_sweep(&spec).unwrap();
    write_csv(&rows, io::stdout().lock()).unwrap();
}
