mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};

fn main() -> ExitCode {
    let (cmd, flags) = Cli::parse().command.split();
    let cfg = match RunConfig::from_flags(&flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if flags.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    match commands::run(cmd, cfg, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
