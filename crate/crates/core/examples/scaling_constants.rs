//! Fitted β, the constants ϑ, δ, k_max, and the φ(n, k) curve.
//!
//! cargo run --example scaling_constants

use magnus_bound::coefficients::nu_recursive;
use magnus_bound::series::{
    beta_sweep, emit_phi_curve, nu_hat, phi_argmax, phi_peak_bound, sweep_csv, DEFAULT_K_CUT,
};

fn main() {
    let table = nu_recursive(24).unwrap();
    let sweep = beta_sweep(&table, 10..=24, DEFAULT_K_CUT).unwrap();
    print!("{}", sweep_csv(&sweep));

    let last = sweep.last().unwrap();
    println!();
    println!("n = 24: beta = {:.6}, delta = {:.6}", last.beta, last.delta);
    let refit = nu_hat(24, last.beta, DEFAULT_K_CUT).unwrap();
    println!(
        "nu_hat(24, beta) = {refit:.10e}, nu_24 = {:.10e}",
        table.get(24).unwrap().to_f64()
    );
    let wider = nu_hat(24, last.beta, 80).unwrap();
    println!(
        "k_cut 80 changes nu_hat by {:.2e} (relative)",
        (wider - refit).abs() / refit
    );

    let curve = emit_phi_curve(24, last.beta, 1..=60).unwrap();
    let (k_peak, v_peak) = curve
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    println!();
    println!(
        "phi(24, k) peaks at k = {k_peak} ({v_peak:.4e}); k_max = {:.3}; peak bound {:.4e}",
        phi_argmax(24, last.beta).unwrap(),
        phi_peak_bound(24, last.beta).unwrap()
    );
    for (k, v) in curve.iter().step_by(5) {
        let bar = "#".repeat((60.0 * v / v_peak) as usize);
        println!("{k:>3} {bar}");
    }
}
