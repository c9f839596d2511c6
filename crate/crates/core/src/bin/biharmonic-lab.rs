use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use biharmonic::cli::{output::to_json_line, run_file, EXIT_OK};
use biharmonic::exec::Execution;
use clap::Parser;

/// Verify, solve and stability-test equivariant biharmonic maps from a JSON config.
#[derive(Parser)]
#[command(name = "biharmonic-lab", version)]
struct Args {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the JSON report and CSV table.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Do not print the summary line on stdout.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run_file(&args.config, &args.out_dir, Execution::default()) {
        Ok(written) => {
            if !args.quiet {
                let line = serde_json::json!({"status": "ok", "exit_code": EXIT_OK, "written": written});
                let _ = std::io::stdout().write_all(&to_json_line(&line).expect("summary serializes"));
            }
            ExitCode::from(EXIT_OK as u8)
        }
        Err(failure) => {
            let _ = std::io::stderr().write_all(&failure.to_json_line());
            ExitCode::from(failure.exit_code as u8)
        }
    }
}
