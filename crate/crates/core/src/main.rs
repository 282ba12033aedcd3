use std::process::ExitCode;

use clap::Parser;
use newton_infinity::cli::{execute, render, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = execute(&cli);
    let text = render(&outcome.report);
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if let Some(msg) = outcome.report.get("error").and_then(|e| e.get("message")) {
        eprintln!("error: {}", msg.as_str().unwrap_or_default());
    }
    ExitCode::from(outcome.exit_code as u8)
}
