//! Scenario runner for dynamical decoupling simulations: JSON configs in,
//! trajectory and sweep CSVs plus a JSON summary out.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{ResolvedScenario, Scenario, ScenarioConfig};
pub use error::CliError;
pub use run::{design, run_scenario, run_sweep, ScenarioOutcome, Summary, SweepOutcome};
