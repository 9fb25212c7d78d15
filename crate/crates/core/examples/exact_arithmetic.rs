//! Exact rationals and Bernoulli numbers.
//!
//! cargo run --example exact_arithmetic

use magnus_bound::exact::{bernoulli, binomial, factorial, Rational};

fn main() {
    let a: Rational = "5/72".parse().unwrap();
    let b = Rational::new(11, 576).unwrap();
    println!("{a} + {b} = {}", &a + &b);
    println!("{a} * {b} = {}", &a * &b);
    println!("{a} / {b} = {}", &a / &b);
    println!("{a} as decimal: {}", a.to_scientific(8));
    println!("1/0 -> {}", Rational::new(1, 0).unwrap_err());

    println!();
    println!("Bernoulli numbers (B_1 = +1/2):");
    for r in 0..=12 {
        println!("  B_{r:<2} = {}", bernoulli(r));
    }
    println!("  B_30 = {}", bernoulli(30));

    println!();
    println!("20! = {}", factorial(20));
    println!("C(30, 15) = {}", binomial(30, 15));
}
