use clap::Parser;

use virtual_thing::cli::{run, run_probe, Cli, Command};

#[tokio::main]
async fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run(args).await,
        Command::Probe(args) => run_probe(args).await,
    };
    std::process::exit(code);
}
