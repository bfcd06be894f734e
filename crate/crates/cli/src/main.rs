use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use schurlab_cli::{run, RunConfig};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SCHURLAB_LOG", "warn")).init();
    let config = RunConfig::parse();
    match run(&config) {
        Ok(outcome) => {
            if config.out.is_none() {
                let _ = std::io::stdout().write_all(outcome.report.as_bytes());
            }
            if outcome.violations > 0 {
                eprintln!("{} invariant violations in results", outcome.violations);
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
