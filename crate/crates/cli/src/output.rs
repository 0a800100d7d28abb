//! CSV and JSON artifacts.

use std::fs;
use std::path::Path;

use decoupling::evolve::TrajectoryResult;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::run::{ScenarioOutcome, SweepOutcome, SweepPoint};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const FREE_TRAJECTORY_FILE: &str = "trajectory_free.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub cycle: u64,
    pub time: f64,
    pub fidelity: f64,
    pub coherence: f64,
    pub trace_distance: f64,
}

pub fn trajectory_rows(traj: &TrajectoryResult) -> Vec<TrajectoryRow> {
    (0..traj.cycles.len())
        .map(|i| TrajectoryRow {
            cycle: traj.cycles[i],
            time: traj.times[i],
            fidelity: traj.fidelity[i],
            coherence: traj.coherence[i],
            trace_distance: traj.trace_distance_to_initial[i],
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta_t: f64,
    pub omega_c_delta_t: f64,
    pub n_cycles: u64,
    pub infidelity: f64,
    pub trace_distance: f64,
    pub ratio: Option<f64>,
}

impl From<&SweepPoint> for SweepRow {
    fn from(p: &SweepPoint) -> Self {
        Self {
            delta_t: p.delta_t,
            omega_c_delta_t: p.omega_c_delta_t,
            n_cycles: p.n_cycles,
            infidelity: p.infidelity,
            trace_distance: p.trace_distance,
            ratio: p.ratio,
        }
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn write_scenario(outcome: &ScenarioOutcome, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    write_csv(&dir.join(TRAJECTORY_FILE), &trajectory_rows(&outcome.controlled))?;
    write_csv(&dir.join(FREE_TRAJECTORY_FILE), &trajectory_rows(&outcome.free))?;
    write_json(&dir.join(SUMMARY_FILE), &outcome.summary)
}

pub fn write_sweep(outcome: &SweepOutcome, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let rows: Vec<SweepRow> = outcome.points.iter().map(SweepRow::from).collect();
    write_csv(&dir.join(SWEEP_FILE), &rows)?;
    write_json(&dir.join(SUMMARY_FILE), &outcome.summary)
}
