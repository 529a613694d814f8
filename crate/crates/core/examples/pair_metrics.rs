//! Distances and overlap between two qubit states given as Bloch vectors.
//!
//! `cargo run --example pair_metrics -- 0.3,0.1,-0.5 -0.2,0.6,0.4`

use qubit_align::metrics::metric_report;
use qubit_align::qstate::BlochVector;

fn parse(arg: &str) -> BlochVector {
    let v: Vec<f64> = arg.split(',').map(|t| t.trim().parse().expect("real number")).collect();
    BlochVector::new(v[0], v[1], v[2]).expect("vector inside the unit ball")
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (r, s) = match args.as_slice() {
        [a, b] => (parse(a), parse(b)),
        _ => (BlochVector::new(0.3, 0.1, -0.5).unwrap(), BlochVector::new(-0.2, 0.6, 0.4).unwrap()),
    };
    let m = metric_report(&r, &s).unwrap();
    println!("r = {r}, s = {s}");
    println!("g*              {:.12}", m.g_star);
    println!("fidelity        {:.12}", m.fidelity);
    println!("d_n             {:.12}", m.d_n);
    println!("bures           {:.12}", m.bures);
    println!("bures angle     {:.12}", m.bures_angle);
    println!("root infidelity {:.12}", m.root_infidelity);
    println!("theta           {:.12}", m.theta);
}
