use clap::Parser;

use sparql2cypher::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
