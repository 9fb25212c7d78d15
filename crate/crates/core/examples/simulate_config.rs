//! Runs a validation described by a config file and prints the JSON report.
//!
//! cargo run --release --example simulate_config [path]

use magnus_bound::numeric::run_simulation;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/example.cfg").into());
    let text = std::fs::read_to_string(&path).unwrap();
    match run_simulation(&text) {
        Ok((config, report)) => {
            eprintln!("{path}: {:?} family, span {:?}", config.family, config.span);
            println!("{}", report.to_json());
        }
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(2);
        }
    }
}
