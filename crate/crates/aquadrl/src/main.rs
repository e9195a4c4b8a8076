use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = aquadrl::cli::Cli::parse();
    match aquadrl::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
