use std::process::ExitCode;

use clap::Parser;
use nlberry_cli::{execute, resolve, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match resolve(&cli).and_then(|cfg| execute(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlberry: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
