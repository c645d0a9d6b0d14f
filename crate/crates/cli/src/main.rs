use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tunnelopt_cli::config::{self, ExperimentConfig};
use tunnelopt_cli::commands;
use tunnelopt_cli::error::CliError;

/// Tunneling-optimal schedules, Lindblad simulation and zero-tunneling controls.
#[derive(Debug, Parser)]
#[command(name = "tunnelopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the CSV and JSON outputs.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Seed for randomized fixtures; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parameter sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Mass profile, τ and the optimal schedule.
    Schedule,
    /// Lindblad simulation with measured against predicted tunneling.
    Evolve,
    /// Piecewise-constant zero-tunneling control.
    Zerotunnel,
    /// τ scaling with the database size for adiabatic search.
    Grover,
    /// Print the JSON schema of the config file.
    Schema,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Command::Schema = cli.command {
        println!("{}", serde_json::to_string_pretty(&config::schema()).expect("schema serializes"));
        return Ok(());
    }
    let file = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(file)?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot set up {n} threads: {e}")))?;
    }
    log::info!("running {:?} with {}", cli.command, file.display());
    match cli.command {
        Command::Schedule => commands::cmd_schedule(&cfg, &cli.out_dir),
        Command::Evolve => commands::cmd_evolve(&cfg, &cli.out_dir),
        Command::Zerotunnel => commands::cmd_zerotunnel(&cfg, &cli.out_dir),
        Command::Grover => commands::cmd_grover(&cfg, &cli.out_dir),
        Command::Schema => unreachable!(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tunnelopt: {e}");
            e.exit_code()
        }
    }
}
