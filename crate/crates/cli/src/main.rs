//! Experiment runner: configuration, deterministic seeding, batch execution,
//! structured JSON-lines + CSV output.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use config::Config;

#[derive(Parser, Debug)]
#[command(
    name = "levy-noise",
    about = "Simulation and numerical verification of Lévy processes, fields and their white noises",
    after_help = "Experiment kinds (config `kind`): simulate | pair | fubini | growth | \
                  dichotomy | charfn | bump-probe | dyadic | validate.\n\
                  `validate` runs the acceptance suite and needs no config file."
)]
struct Cli {
    /// Experiment kind when no config file is given (only `validate`).
    kind: Option<String>,
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for JSON-lines / CSV results.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores). Results are ordered by task index
    /// regardless of completion order, so outputs do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match dispatch(&cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = match (&cli.config, &cli.kind) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            let mut cfg = Config::parse(&text)?;
            if let Some(seed) = cli.seed {
                cfg.seed = Some(seed);
            }
            cfg
        }
        (None, Some(kind)) if kind == "validate" => Config {
            schema_version: config::SCHEMA_VERSION,
            kind: "validate".into(),
            dimension: 1,
            seed: cli.seed,
            seeds: 0,
            triplet: None,
            sim: None,
            experiment: Default::default(),
        },
        _ => {
            anyhow::bail!(
                "a --config file is required (or run `levy-noise validate`); see --help"
            );
        }
    };
    std::fs::create_dir_all(&cli.out)
        .with_context(|| format!("cannot create output dir {}", cli.out.display()))?;
    run::run(&cfg, &cli.out)
}
