//! Command-line front end: direct simulation, large-time evaluation,
//! comparison metrics, modulation tables, scattering presets, and profile
//! tables. All outputs are plain CSV/JSON with a `#`-prefixed parameter
//! echo, so they reproduce byte-for-byte under a fixed configuration.

mod commands;

use clap::Parser;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mkdv",
    version,
    about = "Step-like MKdV: simulation, large-time wave decomposition, and cross-validation"
)]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: std::path::PathBuf,

    /// JSON config file; explicit flags override its fields.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: commands::Command,
}

fn main() -> ExitCode {
    // MKDV_THREADS caps the data-parallel fan-out.
    if let Ok(n) = std::env::var("MKDV_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = Cli::parse();
    match commands::run(cli.command, &cli.out, cli.config.as_deref()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code_for(&e))
        }
    }
}
