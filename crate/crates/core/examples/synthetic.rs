//! Print a synthetic dataset as N-Triples.
//!
//! `cargo run --example synthetic -- [scale] [seed]`

use sparql2cypher::synthetic::{generate, SyntheticConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let scale: f64 = args
        .next()
        .map_or(1.0, |s| s.parse().expect("scale is a number"));
    let mut cfg = SyntheticConfig::default().scaled(scale);
    if let Some(seed) = args.next() {
        cfg.seed = seed.parse().expect("seed is an integer");
    }
    print!("{}", generate(&cfg).to_ntriples());
}
