use std::process::ExitCode;

use clap::Parser;
use cvpm::commands::{run, Cli};
use cvpm::CliError;

/// Sizes the global worker pool from `CVPM_THREADS` when it is set.
fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CVPM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "CVPM_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| run(cli, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvpm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
