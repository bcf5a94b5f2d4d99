use std::process::ExitCode;

use clap::Parser;
use equidist::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("equidist: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
