//! Scenario and sweep execution.

use decoupling::evolve::{estimate_rates, evolve, fit_scaling_exponent, RateEstimate, ScalingFit, SimulationRun, TrajectoryResult};
use decoupling::group::{check_decoupling, DecouplingGroup, DecouplingMode, DecouplingReport, Residual};
use decoupling::model::{interaction_space_of, SystemBathModel};
use decoupling::pauli::PauliWord;
use decoupling::sequence::{pulse_program, schedule_from_group, symmetrize, CycleSchedule};
use decoupling::{minimal_group_search, InteractionSpace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ResolvedScenario;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub omega_c_delta_t: f64,
    pub satisfied: bool,
    pub line: String,
}

impl Feasibility {
    pub fn new(omega_c_delta_t: f64) -> Self {
        let satisfied = omega_c_delta_t <= 1.0;
        let line = if satisfied {
            format!("omega_c*delta_t = {omega_c_delta_t} <= 1: control is faster than the bath memory time")
        } else {
            format!("omega_c*delta_t = {omega_c_delta_t} > 1: control is slower than the bath memory time")
        };
        Self {
            omega_c_delta_t,
            satisfied,
            line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub seed: u64,
    pub qubits: usize,
    pub coupling: String,
    pub bath_modes: usize,
    pub cutoff: f64,
    pub coupling_scale: f64,
    pub group: Vec<String>,
    pub group_order: usize,
    pub symmetric: bool,
    pub pulse_program: Vec<String>,
    pub initial_state: String,
    pub delta_t: f64,
    pub cycle_time: f64,
    pub n_cycles: u64,
    pub total_time: f64,
    pub omega_c_delta_t: f64,
    pub feasibility: Feasibility,
    pub mode: DecouplingMode,
    pub residuals: Vec<Residual>,
    pub maximal_residual: f64,
    pub final_fidelity: f64,
    pub final_infidelity: f64,
    pub final_trace_distance: f64,
    pub free_final_trace_distance: f64,
    pub ratio: Option<f64>,
    pub rates: Option<RateEstimate>,
    pub rate_note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub controlled: TrajectoryResult,
    pub free: TrajectoryResult,
    pub summary: Summary,
}

pub fn residual_table(report: &DecouplingReport) -> String {
    let mut out = format!("{:<8} {:>12}\n", "term", "residual");
    for r in &report.residuals {
        out.push_str(&format!("{:<8} {:>12.3e}\n", r.label, r.norm));
    }
    out
}

/// Classifies the configured group against the model's interaction space;
/// a group that leaves coupling behind is an error carrying the residual table.
pub fn decoupling_check(r: &ResolvedScenario, model: &SystemBathModel) -> Result<DecouplingReport, CliError> {
    let space = interaction_space_of(model);
    let report = check_decoupling(&r.group, &space, model.h_s())?;
    if report.mode == DecouplingMode::None {
        return Err(CliError::NotDecoupled {
            table: residual_table(&report),
        });
    }
    Ok(report)
}

pub fn build_schedule(r: &ResolvedScenario, delta_t: f64) -> Result<CycleSchedule, CliError> {
    let s = schedule_from_group(&r.group, delta_t, None)?;
    Ok(if r.symmetric { symmetrize(&s) } else { s })
}

/// Controlled run at `delta_t` and the matching uncontrolled run sampled at
/// the same times.
pub fn simulate_pair(
    r: &ResolvedScenario,
    model: &SystemBathModel,
    delta_t: f64,
) -> Result<(TrajectoryResult, TrajectoryResult), CliError> {
    let schedule = build_schedule(r, delta_t)?;
    let n = r.cycles_for(delta_t)?;
    let free_schedule = schedule_from_group(&DecouplingGroup::trivial(model.system_dims()), schedule.cycle_time(), None)?;
    let controlled_run =
        SimulationRun::new(model.clone(), schedule, n, r.rho_s0.clone()).with_sample_every(r.sample_every);
    let free_run = SimulationRun::new(model.clone(), free_schedule, n, r.rho_s0.clone()).with_sample_every(r.sample_every);
    let (controlled, free) = rayon::join(|| evolve(&controlled_run), || evolve(&free_run));
    Ok((controlled?, free?))
}

pub fn run_scenario(r: &ResolvedScenario) -> Result<ScenarioOutcome, CliError> {
    let model = r.build_model()?;
    let report = decoupling_check(r, &model)?;
    let schedule = build_schedule(r, r.delta_t)?;
    let (controlled, free) = simulate_pair(r, &model, r.delta_t)?;
    let (rates, rate_note) = match estimate_rates(&free, &controlled) {
        Ok(est) => {
            let note = est.flagged.then(|| "free-run decay fit is unreliable".to_string());
            (Some(est), note)
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let ratio = rates.filter(|e| e.ratio.is_finite()).map(|e| e.ratio);
    let meta = &controlled.metadata;
    let summary = Summary {
        scenario: r.scenario.name().to_string(),
        seed: r.seed,
        qubits: r.qubits,
        coupling: r.coupling.name().to_string(),
        bath_modes: r.bath.n_modes,
        cutoff: r.bath.cutoff,
        coupling_scale: r.bath.coupling_scale,
        group: r.group.labels().to_vec(),
        group_order: r.group.order(),
        symmetric: r.symmetric,
        pulse_program: pulse_program(&schedule),
        initial_state: r.initial_state.clone(),
        delta_t: meta.delta_t,
        cycle_time: meta.cycle_time,
        n_cycles: meta.n_cycles,
        total_time: *controlled.times.last().expect("final sample"),
        omega_c_delta_t: meta.omega_c_delta_t,
        feasibility: Feasibility::new(meta.omega_c_delta_t),
        mode: report.mode,
        residuals: report.residuals.clone(),
        maximal_residual: report.maximal_residual,
        final_fidelity: controlled.final_fidelity(),
        final_infidelity: controlled.final_infidelity(),
        final_trace_distance: controlled.final_trace_distance(),
        free_final_trace_distance: free.final_trace_distance(),
        ratio,
        rates,
        rate_note,
    };
    Ok(ScenarioOutcome {
        controlled,
        free,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub delta_t: f64,
    pub omega_c_delta_t: f64,
    pub n_cycles: u64,
    pub infidelity: f64,
    pub trace_distance: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub scenario: String,
    pub seed: u64,
    pub group: Vec<String>,
    pub symmetric: bool,
    pub mode: DecouplingMode,
    pub total_time: f64,
    pub points: Vec<SweepPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub feasibility: Vec<Feasibility>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub points: Vec<SweepPoint>,
    pub fit: ScalingFit,
    pub summary: SweepSummary,
}

/// Runs the scenario at every swept Δt over the same total time and fits the
/// power law of the terminal infidelity.
pub fn run_sweep(r: &ResolvedScenario) -> Result<SweepOutcome, CliError> {
    let values = r
        .sweep
        .clone()
        .ok_or_else(|| CliError::config("sweep", "the sweep command needs sweep values"))?;
    if values.len() < 3 {
        return Err(CliError::config(
            "sweep.values",
            format!("need at least 3 values, got {}", values.len()),
        ));
    }
    let model = r.build_model()?;
    let report = decoupling_check(r, &model)?;
    let points = values
        .par_iter()
        .map(|&dt| -> Result<SweepPoint, CliError> {
            let (controlled, free) = simulate_pair(r, &model, dt)?;
            let ratio = estimate_rates(&free, &controlled)
                .ok()
                .filter(|e| e.ratio.is_finite())
                .map(|e| e.ratio);
            Ok(SweepPoint {
                delta_t: dt,
                omega_c_delta_t: controlled.metadata.omega_c_delta_t,
                n_cycles: controlled.metadata.n_cycles,
                infidelity: controlled.final_infidelity(),
                trace_distance: controlled.final_trace_distance(),
                ratio,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.delta_t, p.infidelity)).collect();
    let fit = fit_scaling_exponent(&pairs)?;
    let summary = SweepSummary {
        scenario: r.scenario.name().to_string(),
        seed: r.seed,
        group: r.group.labels().to_vec(),
        symmetric: r.symmetric,
        mode: report.mode,
        total_time: r.total_time,
        points: points.clone(),
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        feasibility: points.iter().map(|p| Feasibility::new(p.omega_c_delta_t)).collect(),
    };
    Ok(SweepOutcome { points, fit, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignCandidate {
    pub order: usize,
    pub elements: Vec<String>,
    pub pulse_program: Vec<String>,
}

/// Minimal Pauli groups that average out the span of `interaction`.
pub fn design(interaction: &[String], qubits: usize, max_order: usize) -> Result<Vec<DesignCandidate>, CliError> {
    let words = interaction
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let word: PauliWord = w
                .parse()
                .map_err(|e: decoupling::Error| CliError::config(format!("interaction[{i}]"), e.to_string()))?;
            if word.qubits() != qubits {
                return Err(CliError::config(
                    format!("interaction[{i}]"),
                    format!("{w} acts on {} qubits, expected {qubits}", word.qubits()),
                ));
            }
            Ok(word)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let space = InteractionSpace::from_words(&words)?;
    let groups = minimal_group_search(&space, qubits, max_order)?;
    groups
        .iter()
        .map(|g| {
            let schedule = schedule_from_group(g, 1.0, None)?;
            Ok(DesignCandidate {
                order: g.order(),
                elements: g.labels().to_vec(),
                pulse_program: pulse_program(&schedule),
            })
        })
        .collect()
}

pub fn format_design(candidates: &[DesignCandidate]) -> String {
    if candidates.is_empty() {
        return "no decoupling group within the order cap\n".to_string();
    }
    let mut out = format!(
        "minimal order {}: {} candidate group(s)\n",
        candidates[0].order,
        candidates.len()
    );
    for (i, c) in candidates.iter().enumerate() {
        out.push_str(&format!(
            "[{i}] elements: {}\n    pulses:   {}\n",
            c.elements.join(" "),
            c.pulse_program.join(" - ")
        ));
    }
    out
}
