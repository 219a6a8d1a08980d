use std::process::ExitCode;

use clap::Parser;
use gdfractal::{run, Args, CliError, RunOptions};

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = std::env::var("GDFRACTAL_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = std::fs::read(&args.spec)
        .map_err(|e| CliError::internal(format!("{}: {e}", args.spec.display())))
        .and_then(|bytes| {
            std::panic::catch_unwind(|| run(args.command, &bytes, &RunOptions::from(&args)))
                .unwrap_or_else(|_| Err(CliError::internal("unexpected failure")))
        })
        .and_then(|doc| match &args.out {
            Some(path) => std::fs::write(path, doc).map_err(|e| CliError::internal(format!("{}: {e}", path.display()))),
            None => {
                print!("{doc}");
                Ok(())
            }
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code as u8)
        }
    }
}
