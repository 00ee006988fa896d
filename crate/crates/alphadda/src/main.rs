use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use alphadda::config::{Preset, RunConfig};
use alphadda::service::{self, AppState};
use alphadda::{checkpoint, commands};
use anyhow::Context;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    version,
    about = "Train, evaluate and serve difficulty-adjusting board game agents"
)]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parameter preset, overriding the config.
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Self-play training; resumes from the newest checkpoint in OUT/checkpoints.
    Train,
    /// The first agent plays every other agent.
    Match,
    /// Round-robin tournament with Elo ratings.
    Elo,
    /// Rates the first agent over a parameter sweep against rated opponents.
    Sweep,
    /// Grid search of difficulty-adjustment parameters.
    Gridsearch,
    /// Human-versus-agent HTTP service; the address comes from ALPHADDA_BIND.
    Serve {
        /// Network weights for one variant; repeat for several variants.
        #[arg(long)]
        checkpoint: Vec<PathBuf>,
    },
}

fn load(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(p) = cli.preset {
        cfg.preset = p;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = load(&cli)?;
    let summary = match &cli.command {
        Command::Train => commands::train(&cfg)?.summary,
        Command::Match => commands::run_match(&cfg)?.summary,
        Command::Elo => commands::run_elo(&cfg)?.summary,
        Command::Sweep => commands::run_sweep(&cfg)?.summary,
        Command::Gridsearch => commands::run_gridsearch(&cfg)?.summary,
        Command::Serve { checkpoint: paths } => {
            let mut nets = HashMap::new();
            for path in paths {
                let (meta, net) = checkpoint::load(path)?;
                nets.insert(meta.variant, Arc::new(net));
            }
            let bind = std::env::var(service::BIND_ENV)
                .unwrap_or_else(|_| service::DEFAULT_BIND.to_owned());
            let state = AppState::new(nets, Some(cfg.out.join("sessions")));
            let rt = tokio::runtime::Runtime::new().context("cannot start the async runtime")?;
            return rt.block_on(service::serve(state, &bind));
        }
    };
    println!("{summary}");
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
