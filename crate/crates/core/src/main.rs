use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use leo_handover::cli::{apply_overrides, load_config, run, Overrides, EXIT_CONFIG, EXIT_RUNTIME};
use leo_handover::relay::RelayStrategy;

/// Uplink soft-handover BLER simulator for LEO constellations.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    /// Run configuration (TOML), or a manifest.json from an earlier run.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSVs and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo passes per point (overrides the config).
    #[arg(long)]
    trials: Option<u32>,
    /// Comma-separated subset of hh, af, df, noiseless_af, noiseless_df.
    #[arg(long, value_delimiter = ',')]
    strategy: Option<Vec<RelayStrategy>>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides {
        seed: args.seed,
        trials: args.trials,
        strategies: args.strategy,
        threads: args.threads,
    };
    let loaded = match load_config(&args.config).and_then(|mut l| apply_overrides(&mut l, &overrides).map(|_| l)) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match run(&loaded, &args.out) {
        Ok(m) => {
            let mut out = std::io::stdout().lock();
            for o in &m.outputs {
                if writeln!(out, "{}", args.out.join(o).display()).is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME as u8)
        }
    }
}
