//! Toggling-frame Hamiltonians and the lowest average-Hamiltonian terms for
//! piecewise-constant schedules.
//!
//! With `H̃_j = (g_j⊗1)† H₀ (g_j⊗1)` held for `τ_j`, the first two Magnus
//! terms of the cycle propagator `exp(-i H̄ T_c)` are
//!
//! ```text
//! H̄⁽⁰⁾ = (1/T_c) Σ_j τ_j H̃_j
//! H̄⁽¹⁾ = (-i/(2T_c)) Σ_{j>l} τ_j τ_l [H̃_j, H̃_l]
//! ```

use crate::error::{Error, Result};
use crate::evolve::cycle_propagator;
use crate::group::{project_commutant, DecouplingGroup};
use crate::model::{total_hamiltonian, SystemBathModel};
use crate::operator::{distance, expm_hermitian, tensor, Metric, Operator, C64};
use crate::sequence::CycleSchedule;

#[derive(Debug, Clone)]
pub struct AverageHamiltonianSeries {
    pub h0: Operator,
    pub h1: Operator,
    pub cycle_time: f64,
}

fn check_schedule(model: &SystemBathModel, s: &CycleSchedule) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("empty schedule".into()));
    }
    let d = s.segments()[0].frame.dim();
    if d != model.h_s().dim() {
        return Err(Error::DimensionMismatch(format!(
            "schedule acts on dimension {d}, system has dimension {}",
            model.h_s().dim()
        )));
    }
    Ok(())
}

/// Embeds a system frame as `g ⊗ 1_B`.
pub(crate) fn lift_frame(model: &SystemBathModel, g: &Operator) -> Operator {
    tensor(&g.clone().with_dims(model.system_dims().to_vec()).expect("checked dims"), &Operator::identity(model.bath_dims()))
}

/// `H̃_j = (g_j⊗1)† H₀ (g_j⊗1)`.
pub fn toggled_hamiltonian(model: &SystemBathModel, s: &CycleSchedule, j: usize) -> Result<Operator> {
    check_schedule(model, s)?;
    if j >= s.len() {
        return Err(Error::InvalidArgument(format!(
            "segment {j} out of range for a {}-segment schedule",
            s.len()
        )));
    }
    let h0 = total_hamiltonian(model);
    Ok(h0.conjugated_by(&lift_frame(model, &s.segments()[j].frame)))
}

/// All toggling-frame Hamiltonians of a schedule, in segment order.
pub fn toggled_hamiltonians(model: &SystemBathModel, s: &CycleSchedule) -> Result<Vec<Operator>> {
    check_schedule(model, s)?;
    let h0 = total_hamiltonian(model);
    Ok(s.segments()
        .iter()
        .map(|seg| h0.conjugated_by(&lift_frame(model, &seg.frame)))
        .collect())
}

pub fn average_h0(model: &SystemBathModel, s: &CycleSchedule) -> Result<Operator> {
    let hs = toggled_hamiltonians(model, s)?;
    let tc = s.cycle_time();
    let sum = hs
        .iter()
        .enumerate()
        .fold(Operator::zeros(hs[0].dims()), |acc, (j, h)| acc + h.scale_real(s.duration(j)));
    Ok(sum.scale_real(1.0 / tc))
}

pub fn average_h1(model: &SystemBathModel, s: &CycleSchedule) -> Result<Operator> {
    let hs = toggled_hamiltonians(model, s)?;
    let tc = s.cycle_time();
    let zero = Operator::zeros(hs[0].dims());
    // Σ_{j>l} τ_j τ_l [H_j, H_l] = Σ_j τ_j [H_j, Σ_{l<j} τ_l H_l]
    let mut earlier = zero.clone();
    let mut acc = zero;
    for (j, h) in hs.iter().enumerate() {
        let tau = s.duration(j);
        acc = acc + h.commutator(&earlier).scale_real(tau);
        earlier = earlier + h.scale_real(tau);
    }
    Ok(acc.scale(C64::new(0.0, -1.0 / (2.0 * tc))).hermitian_part())
}

pub fn average_hamiltonian_series(model: &SystemBathModel, s: &CycleSchedule) -> Result<AverageHamiltonianSeries> {
    Ok(AverageHamiltonianSeries {
        h0: average_h0(model, s)?,
        h1: average_h1(model, s)?,
        cycle_time: s.cycle_time(),
    })
}

/// `Π_C(H_S)⊗1 + 1⊗H_B + Σ_α Π_C(S_α)⊗B_α`: the group average applied to
/// each system factor of the model.
pub fn factorwise_projection(model: &SystemBathModel, group: &DecouplingGroup) -> Result<Operator> {
    if group.dim() != model.h_s().dim() {
        return Err(Error::DimensionMismatch(format!(
            "group on dimension {} for a system of dimension {}",
            group.dim(),
            model.h_s().dim()
        )));
    }
    Ok(model.map_system_parts(|s| project_commutant(s, group).expect("checked dims")))
}

/// Frobenius distance between the exact cycle propagator and the one
/// generated by the average Hamiltonian truncated after `order` (0 or 1).
pub fn truncation_error(model: &SystemBathModel, s: &CycleSchedule, order: usize) -> Result<f64> {
    let exact = cycle_propagator(model, s)?;
    let mut h = average_h0(model, s)?;
    match order {
        0 => {}
        1 => h = h + average_h1(model, s)?,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "truncation order {order} not supported (0 or 1)"
            )))
        }
    }
    let approx = expm_hermitian(&h, s.cycle_time())?;
    distance(&exact, &approx, Metric::Frobenius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{pauli_group, PauliVariant};
    use crate::model::{build_spin_bath_model, BathSpec, CouplingKind};
    use crate::operator::I;
    use crate::pauli::{sigma_x, sigma_z};
    use crate::sequence::{schedule_from_group, symmetrize};

    fn dephasing(h_s: Operator) -> SystemBathModel {
        build_spin_bath_model(1, &BathSpec::spin(2, 1.0, 0.3, 21), CouplingKind::Dephasing)
            .unwrap()
            .with_system_hamiltonian(h_s)
            .unwrap()
    }

    fn flip(dt: f64) -> CycleSchedule {
        schedule_from_group(&pauli_group(1, PauliVariant::Flip).unwrap(), dt, None).unwrap()
    }

    #[test]
    fn identity_frame_gives_h0() {
        let model = dephasing(sigma_z().scale_real(0.4));
        let h = toggled_hamiltonian(&model, &flip(0.1), 0).unwrap();
        assert!(distance(&h, &total_hamiltonian(&model), Metric::Frobenius).unwrap() < 1e-14);
        assert!(toggled_hamiltonian(&model, &flip(0.1), 2).is_err());
    }

    #[test]
    fn flip_frame_reverses_dephasing_coupling() {
        let model = dephasing(sigma_z().scale_real(0.4));
        let h1 = toggled_hamiltonian(&model, &flip(0.1), 1).unwrap();
        let id_b = Operator::identity(model.bath_dims());
        let id_s = Operator::identity(&[2]);
        let b = &model.couplings()[0].bath;
        let expected = tensor(&sigma_z(), b).scale_real(-1.0)
            + tensor(&sigma_z().scale_real(-0.4), &id_b)
            + tensor(&id_s, model.h_b());
        assert!(distance(&h1, &expected, Metric::Frobenius).unwrap() < 1e-14);
    }

    #[test]
    fn trivial_schedule_averages() {
        let model = dephasing(sigma_x().scale_real(0.2));
        let s = schedule_from_group(&DecouplingGroup::trivial(&[2]), 0.3, None).unwrap();
        let h0 = average_h0(&model, &s).unwrap();
        assert!(distance(&h0, &total_hamiltonian(&model), Metric::Frobenius).unwrap() < 1e-14);
        assert!(average_h1(&model, &s).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn flip_average_cancels_cross_term() {
        let model = dephasing(sigma_z().scale_real(0.4) + sigma_x().scale_real(0.3));
        let h0 = average_h0(&model, &flip(0.1)).unwrap();
        let expected = tensor(&sigma_x().scale_real(0.3), &Operator::identity(model.bath_dims()))
            + tensor(&Operator::identity(&[2]), model.h_b());
        assert!(distance(&h0, &expected, Metric::Frobenius).unwrap() < 1e-14);
    }

    #[test]
    fn full_group_average_is_c_number_per_factor() {
        let model = build_spin_bath_model(1, &BathSpec::spin(2, 1.0, 0.3, 4), CouplingKind::Total)
            .unwrap()
            .with_system_hamiltonian(sigma_x().scale_real(0.7) + Operator::identity(&[2]).scale_real(0.2))
            .unwrap();
        let s = schedule_from_group(&pauli_group(1, PauliVariant::Full).unwrap(), 0.1, None).unwrap();
        let h0 = average_h0(&model, &s).unwrap();
        let id_s = Operator::identity(&[2]);
        let mut bath = model.h_b().clone();
        for c in model.couplings() {
            bath = bath + c.bath.scale(c.system.trace() / 2.0);
        }
        let expected = tensor(&id_s, &Operator::identity(model.bath_dims())).scale(model.h_s().trace() / 2.0)
            + tensor(&id_s, &bath);
        assert!(distance(&h0, &expected, Metric::Frobenius).unwrap() < 1e-13);
    }

    #[test]
    fn h1_matches_double_integral_quadrature() {
        let model = dephasing(sigma_z().scale_real(0.5 * 0.8));
        let s = flip(0.2);
        let hs = toggled_hamiltonians(&model, &s).unwrap();
        let tc = s.cycle_time();
        let n_grid = 200;
        let h = tc / n_grid as f64;
        let frame_at = |t: f64| -> &Operator { &hs[((t / s.delta_t()).floor() as usize).min(hs.len() - 1)] };
        let mut acc = Operator::zeros(hs[0].dims());
        for a in 0..n_grid {
            let t1 = (a as f64 + 0.5) * h;
            for b in 0..a {
                let t2 = (b as f64 + 0.5) * h;
                acc = acc + frame_at(t1).commutator(frame_at(t2));
            }
        }
        let quad = acc.scale(C64::new(0.0, -1.0 / (2.0 * tc)) * h * h);
        let closed = average_h1(&model, &s).unwrap();
        assert!(distance(&quad, &closed, Metric::Frobenius).unwrap() < 1e-6);
        assert!(closed.is_hermitian());
        assert!(closed.max_abs() > 1e-3);
    }

    #[test]
    fn symmetric_cycle_has_no_first_order_term() {
        let model = build_spin_bath_model(2, &BathSpec::spin(2, 1.0, 0.4, 9), CouplingKind::LinearCollective)
            .unwrap()
            .with_system_hamiltonian(crate::pauli::embed(&sigma_z(), 0, 2).scale_real(0.3))
            .unwrap();
        let s = symmetrize(&schedule_from_group(&pauli_group(2, PauliVariant::Collective).unwrap(), 0.1, None).unwrap());
        assert!(average_h1(&model, &s).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn trivial_schedule_truncation_is_exact() {
        let model = dephasing(sigma_x().scale_real(0.2));
        let s = schedule_from_group(&DecouplingGroup::trivial(&[2]), 0.3, None).unwrap();
        assert!(truncation_error(&model, &s, 0).unwrap() <= 1e-10);
        assert!(truncation_error(&model, &s, 2).is_err());
    }

    #[test]
    fn h0_invariant_under_cyclic_rotation() {
        let model = build_spin_bath_model(1, &BathSpec::spin(2, 1.0, 0.3, 4), CouplingKind::Total).unwrap();
        let g = pauli_group(1, PauliVariant::Full).unwrap();
        let a = average_h0(&model, &schedule_from_group(&g, 0.1, Some(&[0, 1, 2, 3])).unwrap()).unwrap();
        let b = average_h0(&model, &schedule_from_group(&g, 0.1, Some(&[2, 3, 0, 1])).unwrap()).unwrap();
        assert!(distance(&a, &b, Metric::Frobenius).unwrap() < 1e-13);
        let _ = I;
    }
}
