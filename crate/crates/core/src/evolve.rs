//! Exact stroboscopic propagation of system + bath under a decoupling
//! schedule, and the diagnostics used to judge suppression: fidelity to the
//! effective evolution, off-diagonal coherence, observable drift, fitted
//! decay rates and power-law exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magnus::{lift_frame, toggled_hamiltonians};
use crate::model::SystemBathModel;
use crate::operator::{distance, expm_hermitian, tensor, Metric, Operator};
use crate::sequence::CycleSchedule;
use crate::{NUMERICAL_TOL, STRUCTURAL_TOL};

/// `U(T_c) = e^{-iH̃_{n-1}τ} ⋯ e^{-iH̃_0τ}`. The frame returns to the
/// identity after a cycle, so this is also the lab-frame cycle propagator.
pub fn cycle_propagator(model: &SystemBathModel, s: &CycleSchedule) -> Result<Operator> {
    let hs = toggled_hamiltonians(model, s)?;
    let mut u = Operator::identity(hs[0].dims());
    for (j, h) in hs.iter().enumerate() {
        u = &expm_hermitian(h, s.duration(j))? * &u;
    }
    Ok(u)
}

/// `U^n` by repeated squaring.
pub fn propagator_power(u: &Operator, n: u64) -> Operator {
    let mut result = Operator::identity(u.dims());
    let mut base = u.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

const REUNITARIZE_EVERY: u64 = 64;

/// `U^n` for a sampling stride: repeated squaring when `n` is a power of two,
/// otherwise sequential products with a polar correction every 64 factors.
pub fn stride_propagator(u: &Operator, n: u64) -> Result<Operator> {
    if n.is_power_of_two() {
        return propagator_power(u, n).reunitarize();
    }
    let mut acc = Operator::identity(u.dims());
    for i in 1..=n {
        acc = u * &acc;
        if i % REUNITARIZE_EVERY == 0 {
            acc = acc.reunitarize()?;
        }
    }
    acc.reunitarize()
}

/// Checks unit trace, Hermiticity and positivity to 1e-10.
pub fn validate_density(rho: &Operator) -> Result<()> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
        return Err(Error::NotDensity(format!("trace {tr}")));
    }
    if !rho.is_hermitian() {
        return Err(Error::NotDensity(format!(
            "not Hermitian (residual {:.3e})",
            rho.hermitian_residual()
        )));
    }
    let (vals, _) = rho.eigh()?;
    if vals[0] < -STRUCTURAL_TOL {
        return Err(Error::NotDensity(format!("negative eigenvalue {:.3e}", vals[0])));
    }
    Ok(())
}

pub fn purity(rho: &Operator) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`; equals `Tr(ρσ)` when either state is pure.
pub fn fidelity(rho: &Operator, sigma: &Operator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    if purity(sigma) >= 1.0 - 1e-12 || purity(rho) >= 1.0 - 1e-12 {
        return Ok(rho.hs_inner(sigma).re);
    }
    let sqrt_rho = rho.hermitian_function(|v| v.max(0.0).sqrt().into())?;
    let inner = (&(&sqrt_rho * sigma) * &sqrt_rho).hermitian_part();
    let (vals, _) = inner.eigh()?;
    let root_sum: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok(root_sum * root_sum)
}

/// Sum of |ρ_ij| over off-diagonal entries in the computational basis.
pub fn coherence(rho: &Operator) -> f64 {
    let n = rho.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += rho.get(i, j).norm();
            }
        }
    }
    acc
}

/// Time-averaged system Hamiltonian of the schedule, `(1/T_c) Σ τ_j g_j† H_S g_j`.
/// For a group schedule this is the group average `Π_C(H_S)`.
pub fn effective_system_hamiltonian(model: &SystemBathModel, s: &CycleSchedule) -> Operator {
    let tc = s.cycle_time();
    s.segments()
        .iter()
        .enumerate()
        .fold(Operator::zeros(model.system_dims()), |acc, (j, seg)| {
            let frame = seg.frame.clone().with_dims(model.system_dims().to_vec()).expect("system dims");
            acc + model.h_s().conjugated_by(&frame).scale_real(s.duration(j) / tc)
        })
        .hermitian_part()
}

#[derive(Debug, Clone)]
pub enum BathState {
    GroundState,
    Explicit(Operator),
}

#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub model: SystemBathModel,
    pub schedule: CycleSchedule,
    pub n_cycles: u64,
    pub rho_s0: Operator,
    pub rho_b0: BathState,
    pub sample_every: u64,
}

impl SimulationRun {
    pub fn new(model: SystemBathModel, schedule: CycleSchedule, n_cycles: u64, rho_s0: Operator) -> Self {
        Self {
            model,
            schedule,
            n_cycles,
            rho_s0,
            rho_b0: BathState::GroundState,
            sample_every: 1,
        }
    }

    pub fn with_sample_every(mut self, stride: u64) -> Self {
        self.sample_every = stride;
        self
    }

    pub fn total_time(&self) -> f64 {
        self.n_cycles as f64 * self.schedule.cycle_time()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub delta_t: f64,
    pub cycle_time: f64,
    pub n_cycles: u64,
    pub omega_c_delta_t: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryResult {
    pub cycles: Vec<u64>,
    pub times: Vec<f64>,
    pub states: Vec<Operator>,
    pub fidelity: Vec<f64>,
    pub coherence: Vec<f64>,
    pub trace_distance_to_initial: Vec<f64>,
    /// Tr ρ_tot² at each sample.
    pub total_purity: Vec<f64>,
    pub metadata: TrajectoryMetadata,
}

impl TrajectoryResult {
    pub fn final_fidelity(&self) -> f64 {
        *self.fidelity.last().expect("at least the initial sample")
    }

    pub fn final_trace_distance(&self) -> f64 {
        *self.trace_distance_to_initial.last().expect("at least the initial sample")
    }

    pub fn final_infidelity(&self) -> f64 {
        1.0 - self.final_fidelity()
    }
}

/// Sample points `0, s, 2s, …` plus the final cycle.
fn sample_cycles(n: u64, stride: u64) -> Vec<u64> {
    let mut cycles: Vec<u64> = (0..=n).step_by(stride as usize).collect();
    if *cycles.last().expect("non-empty") != n {
        cycles.push(n);
    }
    cycles
}

/// Propagates `ρ_S(0)⊗ρ_B(0)` stroboscopically for `n_cycles` cycles and
/// records reduced states at every `sample_every`-th cycle. Fidelity is
/// measured against `e^{-iH̄_S t} ρ_S(0) e^{iH̄_S t}` with `H̄_S` the
/// schedule-averaged system Hamiltonian.
pub fn evolve(run: &SimulationRun) -> Result<TrajectoryResult> {
    let model = &run.model;
    if run.n_cycles == 0 {
        return Err(Error::InvalidArgument("n_cycles must be at least 1".into()));
    }
    if run.sample_every == 0 {
        return Err(Error::InvalidArgument("sample_every must be at least 1".into()));
    }
    if run.rho_s0.dim() != model.h_s().dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial state of dimension {} for a system of dimension {}",
            run.rho_s0.dim(),
            model.h_s().dim()
        )));
    }
    validate_density(&run.rho_s0)?;
    let rho_s0 = run.rho_s0.clone().with_dims(model.system_dims().to_vec())?;
    let rho_b0 = match &run.rho_b0 {
        BathState::GroundState => model.bath_ground_state()?,
        BathState::Explicit(rho) => {
            if rho.dim() != model.h_b().dim() {
                return Err(Error::DimensionMismatch(format!(
                    "bath state of dimension {} for a bath of dimension {}",
                    rho.dim(),
                    model.h_b().dim()
                )));
            }
            validate_density(rho)?;
            rho.clone().with_dims(model.bath_dims().to_vec())?
        }
    };
    let n_sys = model.system_dims().len();
    let mut rho = tensor(&rho_s0, &rho_b0);

    let u = cycle_propagator(model, &run.schedule)?;
    let stride = run.sample_every.min(run.n_cycles);
    let step = if stride == 1 { u.clone() } else { stride_propagator(&u, stride)? };
    let h_eff = effective_system_hamiltonian(model, &run.schedule);
    let tc = run.schedule.cycle_time();

    let cycles = sample_cycles(run.n_cycles, stride);
    let mut out = TrajectoryResult {
        cycles: Vec::with_capacity(cycles.len()),
        times: Vec::with_capacity(cycles.len()),
        states: Vec::with_capacity(cycles.len()),
        fidelity: Vec::with_capacity(cycles.len()),
        coherence: Vec::with_capacity(cycles.len()),
        trace_distance_to_initial: Vec::with_capacity(cycles.len()),
        total_purity: Vec::with_capacity(cycles.len()),
        metadata: TrajectoryMetadata {
            delta_t: run.schedule.delta_t(),
            cycle_time: tc,
            n_cycles: run.n_cycles,
            omega_c_delta_t: model.cutoff() * run.schedule.delta_t(),
        },
    };

    let mut current = 0u64;
    for &c in &cycles {
        let advance = c - current;
        if advance == stride {
            rho = rho.conjugated_by(&step.dagger());
        } else if advance > 0 {
            let partial = stride_propagator(&u, advance)?;
            rho = rho.conjugated_by(&partial.dagger());
        }
        current = c;
        let t = c as f64 * tc;
        let rho_s = partial_trace_hermitian(&rho, n_sys)?;
        let reference = rho_s0.conjugated_by(&expm_hermitian(&h_eff, -t)?);
        out.fidelity.push(fidelity(&rho_s, &reference)?);
        out.coherence.push(coherence(&rho_s));
        out.trace_distance_to_initial.push(distance(&rho_s, &rho_s0, Metric::Trace)?);
        out.total_purity.push(purity(&rho));
        out.cycles.push(c);
        out.times.push(t);
        out.states.push(rho_s);
    }
    Ok(out)
}

fn partial_trace_hermitian(rho: &Operator, n_sys: usize) -> Result<Operator> {
    Ok(rho.partial_trace_bath(n_sys)?.hermitian_part())
}

/// `|Tr(A ρ_S(nT_c)) − Tr(A ρ_S(0))|` at every sampled cycle. `A` must
/// commute with every control frame of the schedule.
pub fn observable_drift(run: &SimulationRun, a: &Operator) -> Result<Vec<f64>> {
    if a.dim() != run.model.h_s().dim() {
        return Err(Error::DimensionMismatch(format!(
            "observable of dimension {} for a system of dimension {}",
            a.dim(),
            run.model.h_s().dim()
        )));
    }
    for seg in run.schedule.segments() {
        let c = a.commutator(&seg.frame).max_abs();
        if c > NUMERICAL_TOL {
            return Err(Error::NotInCommutant(format!(
                "[A, {}] has max entry {c:.3e}",
                seg.label
            )));
        }
    }
    let traj = evolve(run)?;
    Ok(drift_series(&traj, a))
}

pub fn drift_series(traj: &TrajectoryResult, a: &Operator) -> Vec<f64> {
    let expect = |rho: &Operator| (a * rho).trace().re;
    let initial = expect(&traj.states[0]);
    traj.states.iter().map(|rho| (expect(rho) - initial).abs()).collect()
}

/// Ordinary least squares `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} points", xs.len().min(ys.len()))));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * xs.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateFit("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        rms_residual: (ss_res / n).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `log(error) = slope·log(Δt) + intercept`.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidArgument(format!("non-positive point {p:?}")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = least_squares(&xs, &ys)?;
    Ok(ScalingFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
    })
}

pub const RATE_WINDOW_LOW: f64 = 0.2;
pub const RATE_WINDOW_HIGH: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub gamma: f64,
    pub window: (f64, f64),
    pub residual: f64,
    pub points: usize,
    /// Endpoint secant used instead of a windowed fit.
    pub secant: bool,
}

/// Fits `-ln(c(t)/c(0))` against `t` over the first contiguous stretch with
/// `c/c(0)` in [0.2, 0.95]; falls back to the endpoint secant when fewer than
/// two samples fall inside.
pub fn fit_decay(times: &[f64], coherence: &[f64]) -> Result<DecayFit> {
    let c0 = *coherence
        .first()
        .ok_or_else(|| Error::DegenerateFit("empty trajectory".into()))?;
    if c0 <= 0.0 {
        return Err(Error::DegenerateFit("initial state carries no coherence".into()));
    }
    let ratio: Vec<f64> = coherence.iter().map(|c| c / c0).collect();
    let inside = |r: f64| (RATE_WINDOW_LOW..=RATE_WINDOW_HIGH).contains(&r);
    let start = ratio.iter().position(|&r| inside(r));
    let window: Vec<usize> = match start {
        Some(s) => (s..ratio.len()).take_while(|&i| inside(ratio[i])).collect(),
        None => Vec::new(),
    };
    if window.len() >= 2 {
        let xs: Vec<f64> = window.iter().map(|&i| times[i]).collect();
        let ys: Vec<f64> = window.iter().map(|&i| -ratio[i].ln()).collect();
        let fit = least_squares(&xs, &ys)?;
        return Ok(DecayFit {
            gamma: fit.slope.max(0.0),
            window: (xs[0], *xs.last().expect("non-empty")),
            residual: fit.rms_residual,
            points: window.len(),
            secant: false,
        });
    }
    let t_end = *times.last().expect("non-empty");
    let r_end = *ratio.last().expect("non-empty");
    let gamma = if t_end > 0.0 && r_end > 0.0 {
        (-r_end.ln() / t_end).max(0.0)
    } else if r_end <= 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(DecayFit {
        gamma,
        window: (times[0], t_end),
        residual: 0.0,
        points: 2,
        secant: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub gamma: f64,
    pub gamma_c: f64,
    pub ratio: f64,
    pub fit_window: (f64, f64),
    pub fit_residual: f64,
    pub controlled_window: (f64, f64),
    pub controlled_secant: bool,
    /// The free run did not decay cleanly enough for a trustworthy rate.
    pub flagged: bool,
}

/// Decay rates of the uncontrolled and controlled runs and their ratio γ^C/γ.
pub fn estimate_rates(free: &TrajectoryResult, controlled: &TrajectoryResult) -> Result<RateEstimate> {
    let f = fit_decay(&free.times, &free.coherence)?;
    let c = fit_decay(&controlled.times, &controlled.coherence)?;
    let y_span = {
        let c0 = free.coherence[0];
        let ys: Vec<f64> = free.coherence.iter().map(|v| -(v / c0).ln()).collect();
        ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ys.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let flagged = f.secant || f.points < 3 || f.gamma <= 0.0 || f.residual > 0.25 * y_span;
    Ok(RateEstimate {
        gamma: f.gamma,
        gamma_c: c.gamma,
        ratio: if f.gamma > 0.0 { c.gamma / f.gamma } else { f64::NAN },
        fit_window: f.window,
        fit_residual: f.residual,
        controlled_window: c.window,
        controlled_secant: c.secant,
        flagged,
    })
}

/// Product of free propagators `e^{-iH₀τ_j}` interleaved with the boundary
/// pulses `P_j ⊗ 1`: the lab-frame bang-bang realization of one cycle.
pub fn pulse_picture_propagator(model: &SystemBathModel, s: &CycleSchedule) -> Result<Operator> {
    let h0 = crate::model::total_hamiltonian(model);
    let pulses = crate::sequence::boundary_pulses(s);
    // Lab frame starts in g_0; move there first, then alternate free
    // evolution with pulses, and finally undo g_0.
    let g0 = lift_frame(model, &s.segments()[0].frame);
    let mut u = g0.clone();
    for (j, p) in pulses.iter().enumerate() {
        u = &expm_hermitian(&h0, s.duration(j))? * &u;
        u = &lift_frame(model, p) * &u;
    }
    Ok(&g0.dagger() * &u)
}
