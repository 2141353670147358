use clap::Parser;

use cubic_periods::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
