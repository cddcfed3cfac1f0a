use bandgap_resonance::cli::{run, Invocation};
use clap::Parser;

fn main() {
    let inv = Invocation::parse();
    std::process::exit(run(&inv));
}
