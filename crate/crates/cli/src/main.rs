use std::process::ExitCode;

use clap::Parser;
use npspectra_cli::config::Cli;
use npspectra_cli::{configure_threads, execute, CliError, RunConfig};

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let cfg = RunConfig::from_cli(&cli)?;
    configure_threads(std::env::var("NPSPECTRA_THREADS").ok().as_deref())?;
    let outcome = execute(&cfg)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for path in &outcome.written {
        eprintln!("wrote {}", path.display());
    }
    if !cfg.check {
        for failed in &outcome.failed_checks {
            eprintln!("warning: check {failed}");
        }
    }
    outcome.into_result(cfg.check).map(|_| ())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
