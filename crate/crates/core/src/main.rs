use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use netcb::config::parse_config;
use netcb::Mode;

/// Run NetCB experiments described by a TOML config.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides run.output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; repeat k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Comma-separated modes: baseline, netcb_features_only, netcb_override.
    #[arg(long, value_delimiter = ',')]
    mode: Option<Vec<Mode>>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NETCB_LOG", "info")).init();
    let args = Args::parse();
    let result = parse_config(&args.config).and_then(|mut spec| {
        if let Some(out) = args.out {
            spec.run.output_dir = out;
        }
        if let Some(seed) = args.seed {
            spec.run.seed = seed;
        }
        if let Some(repeats) = args.repeats {
            spec.run.repeats = repeats;
        }
        if let Some(modes) = args.mode {
            spec.run.modes = modes;
        }
        netcb::runner::run(&spec)
    });
    match result {
        Ok(summary) => {
            for (mode, s) in &summary.modes {
                println!(
                    "{mode:<20} regret {:>10.3}  B_acc {:.4}  overrides {:.1}",
                    s.total_regret.mean, s.bandit_accuracy.mean, s.override_count.mean
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
