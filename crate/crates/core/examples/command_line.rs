//! The command-line front end driven in-process.
//!
//! cargo run --example command_line

use magnus_bound::cli::execute;

fn main() {
    for args in [
        vec!["coeffs", "10", "all"],
        vec!["--format", "csv", "trees", "3", "--with-coefficients"],
        vec!["series", "--gen-coeffs", "6"],
        vec!["bounds", "1.0", "0.5434", "3", "--tight", "--compare"],
        vec!["verify", "envelope"],
    ] {
        println!("$ magnus-bound {}", args.join(" "));
        let out = execute(std::iter::once("magnus-bound").chain(args));
        print!("{}{}", out.stdout, out.stderr);
        println!("(exit {})", out.code);
        println!();
    }
}
