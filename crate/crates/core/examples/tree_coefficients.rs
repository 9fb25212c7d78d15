//! Per-tree coefficients α and μ, and ν_n by three routes.
//!
//! cargo run --example tree_coefficients

use magnus_bound::coefficients::{
    coefficient_records, mu, mu_oracle, nu_enumeration, nu_recursive, nu_simplified, TABLE_ONE,
};
use magnus_bound::trees::seven_leaf_example;

fn main() {
    for n in 1..=4 {
        println!("n = {n}");
        for r in coefficient_records(n).unwrap() {
            println!(
                "  {:<12} alpha = {:<6} mu = {:<6} |alpha| mu = {}",
                r.tree.to_string(),
                r.alpha.to_string(),
                r.mu.to_string(),
                r.product
            );
        }
    }

    let seven = seven_leaf_example();
    println!();
    println!(
        "mu{seven} = {} (literal integral: {})",
        mu(&seven),
        mu_oracle(&seven)
    );

    let table = nu_recursive(24).unwrap();
    println!();
    println!("{:>3}  {:<28} {:<16} check", "n", "nu_n", "decimal");
    for (n, v) in table.iter() {
        let check = if n <= 10 {
            let by_trees = nu_enumeration(n).unwrap();
            let printed = TABLE_ONE[n - 1];
            format!(
                "trees agree: {}, table agrees: {}",
                by_trees == *v,
                printed == v.to_string()
            )
        } else {
            String::new()
        };
        let exact = v.to_string();
        let exact = if exact.len() > 28 {
            format!("{}...", &exact[..25])
        } else {
            exact
        };
        println!("{n:>3}  {exact:<28} {:<16} {check}", v.to_scientific(8));
    }

    let simplified = nu_simplified(8).unwrap();
    println!();
    println!("simplified recursion (r <= 2 only):");
    for (n, v) in simplified.iter() {
        println!("  {n}: {v} vs {}", table.get(n).unwrap());
    }
}
