use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use clap::Parser;
use eigenhist_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EIGENHIST_LOG", "warn")).init();
    let cli = Cli::parse();
    match catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("eigenhist: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        // an internal bug; report it as a numerical failure rather than abort
        Err(_) => ExitCode::from(3),
    }
}
