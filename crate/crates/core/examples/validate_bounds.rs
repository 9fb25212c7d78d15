//! Random two-level instances at x = 0.3 checked against the per-term and
//! truncation bounds.
//!
//! cargo run --release --example validate_bounds [instances] [x]

use magnus_bound::numeric::{random_generator, validate_bounds, QuadratureConfig, Status};

fn main() {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let x: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let quad = QuadratureConfig::default();

    let mut failures = 0;
    for seed in 0..count {
        let gen = random_generator(2, x, seed).unwrap();
        let report = validate_bounds(&gen, 1.0, 4, &quad).unwrap();
        let worst_term = report
            .per_term
            .iter()
            .map(|r| r.measured / r.bound)
            .fold(0.0, f64::max);
        let worst_trunc = report
            .truncation
            .iter()
            .filter_map(|r| r.bound.value().map(|b| r.measured / b))
            .fold(0.0, f64::max);
        println!(
            "seed {seed:>2}: {:?}  max measured/bound  terms {worst_term:.3e}  truncation {worst_trunc:.3e}",
            report.status
        );
        if report.status != Status::Pass {
            failures += 1;
        }
    }
    println!("{failures} of {count} instances failed");
}
