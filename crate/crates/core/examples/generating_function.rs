//! The generating function f = Σ ν_n x^n, its ODE and the integral series.
//!
//! cargo run --example generating_function

use magnus_bound::coefficients::nu_recursive;
use magnus_bound::series::{
    bernoulli_weight_series, cot_half_series, lhs_integral_series, ode_rhs_series, verify_ode,
    PowerSeries, PRINTED_ORDER_FOUR,
};

fn main() {
    println!("(f/2) cot(f/2) = {}", cot_half_series(8).unwrap());
    println!("Σ |B_r|/r! f^r  = {}", bernoulli_weight_series(8));
    println!("f/2 - (f/2)cot(f/2) + 1 = {}", ode_rhs_series(8).unwrap());

    let s = lhs_integral_series(7).unwrap();
    println!();
    println!("∫ df / g(f) = {} log(f) + S(f)", s.log_coefficient);
    println!("S(f) = {}", s.series);
    println!(
        "order-4 coefficient: {} (published as {PRINTED_ORDER_FOUR})",
        s.series.coeff(4).unwrap()
    );
    let g = ode_rhs_series(8).unwrap();
    println!("derivative times g: {}", s.derivative_times(&g).unwrap());

    let table = nu_recursive(16).unwrap();
    let report = verify_ode(&table).unwrap();
    println!();
    println!("ODE check: {report:?}");

    let perturbed = table.clone().with_value(3, "1/14".parse().unwrap());
    println!("with nu_3 = 1/14: {:?}", verify_ode(&perturbed).unwrap());

    let geometric = PowerSeries::from_coefficients(vec![
        0.into(),
        1.into(),
        1.into(),
        1.into(),
        1.into(),
        1.into(),
        1.into(),
    ]);
    let x2 = PowerSeries::from_coefficients(vec![
        0.into(),
        0.into(),
        1.into(),
        0.into(),
        0.into(),
        0.into(),
        0.into(),
    ]);
    println!();
    println!("x/(1-x) at x^2: {}", geometric.compose(&x2).unwrap());
}
