use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tns_cli::commands::load_tensor;
use tns_cli::config::parse_partial_config;
use tns_cli::error::{EXIT_CLEAN, EXIT_CONFIG, EXIT_VIOLATION};
use tns_cli::{
    cmd_constants, cmd_heat, cmd_run, cmd_threshold, cmd_verify, parse_config_with_overrides, CliError, RunConfig,
    Suite, VerifyOptions,
};

/// Anisotropic Navier-Stokes on the torus: runs, property checks and constants.
#[derive(Parser)]
#[command(name = "tns", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Configuration file (`key = value` lines).
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override or add a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured scenario and write diagnostics.
    Run(ConfigArgs),
    /// Run a seeded property suite (all suites when none is named).
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Evaluate the small-data existence condition.
    Threshold(ConfigArgs),
    /// Print heat-semigroup integrals and the energy identity defect.
    Heat(ConfigArgs),
    /// Commutator constant and the empirical multiplication constant.
    Constants(ConfigArgs),
}

fn read(args: &ConfigArgs) -> Result<String, CliError> {
    match &args.config {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::io(p, e)),
        None => Ok(String::new()),
    }
}

fn full_config(args: &ConfigArgs) -> Result<RunConfig, CliError> {
    parse_config_with_overrides(&read(args)?, &args.set)
}

fn partial_config(args: &ConfigArgs) -> Result<RunConfig, CliError> {
    parse_partial_config(&read(args)?, &args.set)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = full_config(&args)?;
            let out = cmd_run(&cfg)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {} rows to {}", out.rows, out.csv.display());
            if !out.snapshots.is_empty() {
                println!("wrote {} snapshots to {}", out.snapshots.len(), cfg.snapshot_dir.display());
            }
            Ok(EXIT_CLEAN)
        }
        Command::Verify {
            suite,
            seed,
            trials,
            config,
        } => {
            let cfg = partial_config(&config)?;
            let suites = match suite {
                Some(s) => vec![s.parse::<Suite>().map_err(|e| CliError::config("--suite", e))?],
                None => Suite::ALL.to_vec(),
            };
            let opts = VerifyOptions {
                tolerances: cfg.tolerances.clone(),
                tensor: if cfg.tensor_explicit { Some(load_tensor(&cfg)?) } else { None },
                ellipticity_samples: cfg.ellipticity_samples,
            };
            let mut ok = true;
            for s in suites {
                let report = cmd_verify(s, seed.unwrap_or(cfg.seed), trials.unwrap_or(cfg.trials), &opts);
                println!("{report}\n");
                ok &= report.passed();
            }
            Ok(if ok { EXIT_CLEAN } else { EXIT_VIOLATION })
        }
        Command::Threshold(args) => {
            let out = cmd_threshold(&full_config(&args)?)?;
            println!("{out}");
            Ok(if out.passed() { EXIT_CLEAN } else { EXIT_VIOLATION })
        }
        Command::Heat(args) => {
            println!("{}", cmd_heat(&full_config(&args)?)?);
            Ok(EXIT_CLEAN)
        }
        Command::Constants(args) => {
            println!("{}", cmd_constants(&partial_config(&args)?)?);
            Ok(EXIT_CLEAN)
        }
    }
}

fn main() -> ExitCode {
    let code = match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(u8::try_from(code).unwrap_or(EXIT_CONFIG as u8))
}
