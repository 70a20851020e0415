use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use manet_sim::experiment::{emit_results, run_experiment, ExperimentOptions};
use manet_sim::{ScenarioConfig, SimError};

#[derive(Parser)]
#[command(
    name = "manet-sim",
    version,
    about = "AODV black-hole attack simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario (and any sweeps it declares) and write CSV results.
    Run {
        config: PathBuf,
        /// Comma-separated seeds; overrides `seeds`.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Comma-separated attacker counts; overrides `sweep.attackers`.
        #[arg(long, value_delimiter = ',')]
        attackers: Option<Vec<usize>>,
        /// Comma-separated node speeds in m/s (0 = static); overrides `sweep.speeds`.
        #[arg(long, value_delimiter = ',')]
        speeds: Option<Vec<f64>>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Write one event trace per run.
        #[arg(long)]
        trace: bool,
        /// Write every node's routing table at the end of each run.
        #[arg(long)]
        dump_tables: bool,
    },
    /// Print the default configuration.
    Defaults,
}

fn threads_from_env() -> Result<Option<usize>, SimError> {
    match std::env::var("MANET_SIM_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map(Some).map_err(|_| {
            SimError::Config(manet_sim::error::ConfigErrors(vec![
                manet_sim::error::ConfigIssue {
                    key: "MANET_SIM_THREADS".into(),
                    line: None,
                    message: format!("`{v}` is not a thread count"),
                },
            ]))
        }),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::Defaults => {
            print!("{}", ScenarioConfig::default().to_config_text());
            Ok(())
        }
        Command::Run {
            config,
            seeds,
            attackers,
            speeds,
            out,
            trace,
            dump_tables,
        } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(s) = seeds {
                cfg.seeds = s;
            }
            if let Some(a) = attackers {
                cfg.sweep_attackers = a;
            }
            if let Some(v) = speeds {
                cfg.sweep_speeds = v;
            }
            cfg.validate()?;
            let opts = ExperimentOptions {
                trace,
                dump_tables,
                threads: threads_from_env()?,
            };
            let result = run_experiment(&cfg, &opts)?;
            emit_results(&result, &out)?;
            for c in &result.cells {
                println!(
                    "attackers={} speed={} runs={} mean_pdr={:.4} min={:.4} max={:.4}",
                    c.attackers,
                    c.speed,
                    c.pdr.per_run.len(),
                    c.pdr.mean,
                    c.pdr.min,
                    c.pdr.max
                );
            }
            println!("results written to {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
