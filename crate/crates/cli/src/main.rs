use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use tauber_cli::{emit, load_scenario, run, Format, RunOptions};

#[derive(Parser)]
#[command(name = "tauber", version, about = "Numerical checks of continuity and Tauberian theorems for signed measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a scenario file and write the reports.
    Run {
        scenario: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
        /// Override `config.n_max`.
        #[arg(long)]
        n_max: Option<u64>,
        /// Override `config.tol`.
        #[arg(long)]
        tol: Option<f64>,
        /// Suppress the per-check summary.
        #[arg(long)]
        quiet: bool,
        /// Record wall-clock time per check (makes reports non-reproducible).
        #[arg(long)]
        timings: bool,
    },
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("TAUBER_THREADS") {
        let n: usize = v.parse().with_context(|| format!("TAUBER_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    init_threads()?;
    match cli.command {
        Command::Run { scenario, out, format, n_max, tol, quiet, timings } => {
            let mut sc = load_scenario(&scenario)?;
            if let Some(n) = n_max {
                sc.config.n_max = n;
            }
            if let Some(t) = tol {
                sc.config.tol = t;
            }
            sc.validate()?;
            let report = run(&sc, RunOptions { timings });
            let written = emit(&report, format, &out)?;
            if !quiet {
                for c in &report.checks {
                    let expect = c.expect.map(|e| format!(" (expected {})", e.as_str())).unwrap_or_default();
                    println!("{:<13} {} [{}]{expect}", c.outcome.as_str().to_uppercase(), c.name, c.report.status.as_str());
                }
                for p in written {
                    println!("wrote {}", p.display());
                }
            }
            Ok(report.exit_code() as u8)
        }
    }
}
