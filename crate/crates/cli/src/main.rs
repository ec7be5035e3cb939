use clap::Parser;
use cohpure_cli::{configure_threads, run, Cli, EXIT_INPUT};

fn main() {
    let cli = Cli::parse();
    let code = configure_threads().and_then(|()| run(cli)).unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        EXIT_INPUT
    });
    std::process::exit(code);
}
