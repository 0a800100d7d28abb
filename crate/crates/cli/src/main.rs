use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use ddsim::output::{write_scenario, write_sweep};
use ddsim::run::format_design;
use ddsim::{design, run_scenario, run_sweep, CliError, ResolvedScenario, ScenarioConfig};

#[derive(Parser)]
#[command(name = "ddsim", version, about = "Dynamical decoupling of open quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a controlled and an uncontrolled simulation.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the scenario across the swept delta_t values and fit the scaling exponent.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for minimal Pauli groups that average out an interaction space.
    Design {
        /// Pauli words spanning the interaction space, e.g. "ZI,IZ".
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        interaction: Vec<String>,
        #[arg(long)]
        qubits: usize,
        #[arg(long, default_value_t = 64)]
        max_order: usize,
    },
}

fn output_dir(out: Option<PathBuf>, r: &ResolvedScenario) -> anyhow::Result<PathBuf> {
    out.or_else(|| r.output_dir.clone())
        .context("no output directory: pass --out or set output_dir")
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let r = ResolvedScenario::from_config(&ScenarioConfig::load(&config)?)?;
            let dir = output_dir(out, &r)?;
            let outcome = run_scenario(&r)?;
            write_scenario(&outcome, &dir)?;
            let s = &outcome.summary;
            println!("mode: {}", s.mode);
            println!("{}", s.feasibility.line);
            println!("final fidelity: {}", s.final_fidelity);
            match s.ratio {
                Some(ratio) => println!("rate ratio gamma_c/gamma: {ratio}"),
                None => println!("rate ratio unavailable: {}", s.rate_note.as_deref().unwrap_or("no estimate")),
            }
        }
        Command::Sweep { config, out } => {
            let r = ResolvedScenario::from_config(&ScenarioConfig::load(&config)?)?;
            let dir = output_dir(out, &r)?;
            let outcome = run_sweep(&r)?;
            write_sweep(&outcome, &dir)?;
            println!("slope: {} (r^2 = {})", outcome.fit.slope, outcome.fit.r_squared);
        }
        Command::Design {
            interaction,
            qubits,
            max_order,
        } => {
            print!("{}", format_design(&design(&interaction, qubits, max_order)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
