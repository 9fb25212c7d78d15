//! Magnus terms of a two-level system from trees and from the nested
//! integrals, and the propagators they generate.
//!
//! cargo run --release --example magnus_terms

use magnus_bound::numeric::{
    expm, exponent_sum, magnus_term_direct, magnus_terms_tree, matrix_csv, op_norm,
    reference_propagator, unitarity_defect, Envelope, GeneratorFunction, QuadratureConfig,
};

fn main() {
    // H(t) = σx + t σz
    let gen = GeneratorFunction::pauli(
        Some(Envelope::constant(1.0)),
        None,
        Some(Envelope::Polynomial {
            coefficients: vec![0.0, 1.0],
        }),
    );
    let t = 0.5;
    let quad = QuadratureConfig::default();

    let terms = magnus_terms_tree(5, &gen, t, &quad).unwrap();
    println!(
        "{:>2}  {:>14}  {:>14}  {:>10}",
        "n", "|M_n| trees", "|M_n| direct", "rel diff"
    );
    for e in &terms {
        let direct = if e.n <= 4 {
            let d = magnus_term_direct(e.n, &gen, t, &quad).unwrap();
            let rel = op_norm(&(&e.matrix - &d.matrix)) / d.norm.max(1e-300);
            format!("{:>14.6e}  {rel:>10.2e}", d.norm)
        } else {
            format!("{:>14}  {:>10}", "-", "-")
        };
        println!("{:>2}  {:>14.6e}  {direct}", e.n, e.norm);
    }

    println!();
    println!("M_3 entries:");
    print!("{}", matrix_csv(&terms[2].matrix));

    let u = reference_propagator(&gen, t, 1e-12).unwrap();
    println!();
    println!(
        "reference propagator: {} steps, estimate {:.1e}",
        u.steps, u.error_estimate
    );
    for n in 1..=5 {
        let un = expm(&exponent_sum(&terms, n));
        println!(
            "N = {n}: |U - U_N| = {:.3e}, unitarity defect {:.1e}",
            op_norm(&(&u.matrix - &un)),
            unitarity_defect(&un)
        );
    }
}
