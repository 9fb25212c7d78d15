//! Left-ordered trees, their counts and the commutators they encode.
//!
//! cargo run --example tree_enumeration [n]

use magnus_bound::trees::{count, enumerate, seven_leaf_example, Tree};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4);

    println!("trees with {n} leaves:");
    for t in enumerate(n).unwrap().iter() {
        println!("  {:<14} {}", t.to_string(), t.to_commutator_expression());
    }

    println!();
    println!("counts (Catalan numbers):");
    for k in 1..=12 {
        println!("  n = {k:>2}: {}", count(k).unwrap());
    }

    let seven = seven_leaf_example();
    println!();
    println!("{seven} has {} leaves", seven.leaves());
    println!("as a full binary tree: {:?}", seven.to_full_binary());

    let parsed = Tree::parse("((L) L)").unwrap();
    println!(
        "parsed {parsed}: arity {}, grafts {:?}",
        parsed.arity(),
        parsed.grafts()
    );
    println!("bad input: {}", Tree::parse("(L").unwrap_err());
}
