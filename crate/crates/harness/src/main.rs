use clap::Parser;
use gls_harness::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
