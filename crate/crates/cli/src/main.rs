use std::process::ExitCode;

use clap::Parser;
use hmm_cli::{emit, error_json, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => match emit(&cli, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{}", serde_json::json!({"error": "Io", "message": e.to_string()}));
                ExitCode::FAILURE
            }
        },
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::FAILURE
        }
    }
}
