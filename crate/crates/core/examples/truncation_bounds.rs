//! Coefficient envelope, per-term bounds and truncation bounds.
//!
//! cargo run --example truncation_bounds [h_max t N]

use magnus_bound::bounds::{
    coefficient_envelope, comparison_csv, comparison_table, BoundInput, BoundReport,
};
use magnus_bound::coefficients::nu_recursive;

fn main() {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let (h_max, t, order) = match args.as_slice() {
        [h, t, n] => (*h, *t, *n as usize),
        _ => (1.0, 0.5434, 3),
    };

    let table = nu_recursive(24).unwrap();
    println!("{:>3}  {:>12}  {:>12}  {:>6}", "n", "nu_n", "m(n)", "ratio");
    for (n, v) in table.iter() {
        let m = coefficient_envelope(n).unwrap();
        println!(
            "{n:>3}  {:>12.4e}  {m:>12.4e}  {:>6.3}",
            v.to_f64(),
            v.to_f64() / m
        );
    }

    let report = BoundReport::evaluate(BoundInput::new(h_max, t, order).unwrap());
    println!();
    println!("{}", report.to_json());

    println!();
    print!(
        "{}",
        comparison_csv(&comparison_table(order.max(6), h_max, t).unwrap())
    );
}
