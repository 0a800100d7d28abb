//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ddsim::config::{ResolvedScenario, Scenario, ScenarioConfig};
use ddsim::run::{build_schedule, run_sweep, simulate_pair};
use decoupling::evolve::{evolve, SimulationRun};
use decoupling::group::{commutant_basis, minimal_group_search, pauli_group, project_commutant, DecouplingGroup, PauliVariant};
use decoupling::magnus::{average_h0, average_h1, factorwise_projection, truncation_error};
use decoupling::model::{build_spin_bath_model, interaction_space_of, BathOperators, BathSpec, CouplingKind, InteractionSpace};
use decoupling::operator::{Operator, C64};
use decoupling::pauli::{sigma_z, PauliWord};
use decoupling::sequence::{schedule_from_group, symmetrize};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scientific(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn resolved(scenario: Scenario) -> ResolvedScenario {
    ResolvedScenario::from_config(&ScenarioConfig::preset(scenario, 7)).expect("preset resolves")
}

fn random_operator(rng: &mut ChaCha8Rng, dims: &[usize]) -> Operator {
    let d: usize = dims.iter().product();
    let entries: Vec<C64> = (0..d * d)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Operator::from_rows(d, &entries).unwrap().with_dims(dims.to_vec()).unwrap()
}

fn projector_algebra() -> Outcome {
    let groups = [
        DecouplingGroup::trivial(&[2]),
        pauli_group(1, PauliVariant::Flip).unwrap(),
        pauli_group(2, PauliVariant::Collective).unwrap(),
        pauli_group(1, PauliVariant::Full).unwrap(),
        pauli_group(2, PauliVariant::Full).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for g in &groups {
        let n = g.order() as f64;
        let one = Operator::identity(g.dims());
        worst = worst.max((&project_commutant(&one, g).unwrap() - &one).max_abs());
        for _ in 0..100 {
            let s = random_operator(&mut rng, g.dims());
            let p = project_commutant(&s, g).unwrap();
            worst = worst.max((&project_commutant(&p, g).unwrap() - &p).max_abs());
            worst = worst.max((p.trace() - s.trace()).norm());
            for e in g.elements() {
                worst = worst.max(p.commutator(e).max_abs());
            }
            let phased = g.elements().iter().fold(Operator::zeros(g.dims()), |acc, e| {
                let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
                acc + s.conjugated_by(&e.scale(phase)).scale_real(1.0 / n)
            });
            worst = worst.max((&phased - &p).max_abs());
        }
    }
    check(worst <= 1e-10, format!("max residual {worst:.2e} over 5 groups x 100 operators"))
}

fn time_average_identity() -> Outcome {
    let kinds = [CouplingKind::Dephasing, CouplingKind::LinearCollective, CouplingKind::Total];
    let groups = [
        DecouplingGroup::trivial(&[2, 2]),
        pauli_group(2, PauliVariant::Flip).unwrap(),
        pauli_group(2, PauliVariant::Collective).unwrap(),
        pauli_group(2, PauliVariant::Full).unwrap(),
    ];
    let mut worst = 0.0f64;
    for (i, kind) in kinds.iter().enumerate() {
        let model = build_spin_bath_model(2, &BathSpec::spin(3, 1.0, 0.4, 100 + i as u64), *kind).unwrap();
        for g in &groups {
            let s = schedule_from_group(g, 0.07, None).unwrap();
            let d = (&average_h0(&model, &s).unwrap() - &factorwise_projection(&model, g).unwrap()).max_abs();
            worst = worst.max(d);
        }
    }
    check(worst <= 1e-10, format!("max deviation {worst:.2e} over 3 models x 4 groups"))
}

fn c_number_collapse() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=2 {
        let g = pauli_group(k, PauliVariant::Full).unwrap();
        let dims = vec![2; k];
        let d = g.dim();
        for i in 0..d {
            for j in 0..d {
                let p = project_commutant(&Operator::matrix_unit(&dims, i, j), &g).unwrap();
                worst = worst.max(p.traceless_part().frobenius_norm());
            }
        }
    }
    check(worst <= 1e-8, format!("max traceless remainder {worst:.2e} for K=1,2"))
}

fn null_space(group: &DecouplingGroup) -> Vec<Vec<C64>> {
    let d = group.dim();
    let id = DMatrix::<C64>::identity(d, d);
    let mut stacked = DMatrix::<C64>::zeros(group.order() * d * d, d * d);
    for (b, g) in group.elements().iter().enumerate() {
        let block = g.matrix().kronecker(&id) - id.kronecker(&g.matrix().transpose());
        stacked.view_mut((b * d * d, 0), (d * d, d * d)).copy_from(&block);
    }
    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.unwrap();
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < 1e-10)
        .map(|(i, _)| v_t.row(i).iter().map(|z| z.conj()).collect())
        .collect()
}

fn span_residual(basis: &[Vec<C64>], op: &Operator) -> f64 {
    let d = op.dim();
    let v: Vec<C64> = (0..d * d).map(|n| op.get(n / d, n % d)).collect();
    let mut r = v.clone();
    for b in basis {
        let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= overlap * bi;
        }
    }
    r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn commutant_oracle() -> Outcome {
    let g = pauli_group(2, PauliVariant::Collective).unwrap();
    let basis = commutant_basis(&g);
    let oracle = null_space(&g);
    let mut worst = 0.0f64;
    for op in &basis.basis {
        worst = worst.max(span_residual(&oracle, op));
    }
    for w in ["II", "XX", "YY", "ZZ"] {
        let op = w.parse::<PauliWord>().unwrap().to_operator();
        worst = worst.max(basis.residual(&op)).max(span_residual(&oracle, &op));
    }
    let ok = basis.dimension == 4 && oracle.len() == 4 && worst <= 1e-8;
    check(
        ok,
        format!("dimension {} (oracle {}), overlap residual {worst:.2e}", basis.dimension, oracle.len()),
    )
}

fn minimal_groups() -> Outcome {
    let start = Instant::now();
    let z = InteractionSpace::new(&[sigma_z()]).unwrap();
    let one = minimal_group_search(&z, 1, 64).unwrap();
    let model = build_spin_bath_model(2, &BathSpec::spin(3, 1.0, 0.3, 1), CouplingKind::LinearCollective).unwrap();
    let collective = interaction_space_of(&model);
    let two = minimal_group_search(&collective, 2, 64).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let o1 = one.first().map_or(0, |g| g.order());
    let o2 = two.first().map_or(0, |g| g.order());
    let has_tensor_power = two.iter().any(|g| {
        let mut labels = g.labels().to_vec();
        labels.sort();
        labels == ["II", "XX", "YY", "ZZ"]
    });
    check(
        o1 == 2 && o2 == 4 && has_tensor_power && elapsed <= 30.0,
        format!("K=1 sigma_z: order {o1}; K=2 collective: order {o2}; {elapsed:.2}s"),
    )
}

fn magnus_orders() -> Outcome {
    let r = resolved(Scenario::DephasingEcho);
    let model = r.build_model().unwrap();
    let steps: Vec<f64> = (0..4).map(|i| r.delta_t / f64::from(1 << i)).collect();
    let ratios = |order: usize| -> Vec<f64> {
        let errs: Vec<f64> = steps
            .iter()
            .map(|&dt| truncation_error(&model, &build_schedule(&r, dt).unwrap(), order).unwrap())
            .collect();
        errs.windows(2).map(|w| w[0] / w[1]).collect()
    };
    let r0 = ratios(0);
    let r1 = ratios(1);
    let ok = r0.iter().all(|x| (3.2..=4.8).contains(x)) && r1.iter().all(|x| (6.0..=10.0).contains(x));
    check(ok, format!("order 0 ratios {r0:.3?}; order 1 ratios {r1:.3?}"))
}

fn symmetric_oddness() -> Outcome {
    let kinds = [CouplingKind::Dephasing, CouplingKind::LinearIndependent, CouplingKind::LinearCollective, CouplingKind::Total];
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let kind = kinds[seed as usize % kinds.len()];
        let k = 1 + (seed as usize % 2);
        let variant = if k == 1 { PauliVariant::Full } else { PauliVariant::Collective };
        let model = build_spin_bath_model(k, &BathSpec::spin(3, 1.0, 0.5, seed), kind).unwrap();
        let s = symmetrize(&schedule_from_group(&pauli_group(k, variant).unwrap(), 0.1, None).unwrap());
        worst = worst.max(average_h1(&model, &s).unwrap().frobenius_norm());
    }
    check(worst <= 1e-10, format!("max norm {worst:.2e} over 10 models"))
}

fn maximal_convergence() -> Outcome {
    let r = resolved(Scenario::MaximalAveraging);
    let model = r.build_model().unwrap();
    let distances: Vec<f64> = [25u64, 50, 100, 200]
        .iter()
        .map(|&n| {
            let s = build_schedule(&r, r.total_time / (r.group.order() as f64 * n as f64)).unwrap();
            evolve(&SimulationRun::new(model.clone(), s, n, r.rho_s0.clone()).with_sample_every(n))
                .unwrap()
                .final_trace_distance()
        })
        .collect();
    let factors: Vec<f64> = distances.windows(2).map(|w| w[0] / w[1]).collect();
    check(
        factors.iter().all(|f| *f >= 1.5),
        format!("D(T) {}; step factors {factors:.3?}", scientific(&distances)),
    )
}

fn dephasing_sweep(symmetric: bool) -> ddsim::SweepOutcome {
    let mut cfg = ScenarioConfig::preset(Scenario::DephasingEcho, 7);
    cfg.symmetric = Some(symmetric);
    let r = ResolvedScenario::from_config(&cfg).unwrap();
    assert!(r.system_hamiltonian.is_empty());
    run_sweep(&r).unwrap()
}

fn scaling_first_order(plain: &ddsim::SweepOutcome) -> Outcome {
    let f = plain.fit;
    check(
        (f.slope - 2.0).abs() <= 0.5 && f.r_squared >= 0.98,
        format!("slope {:.3}, r^2 {:.5}", f.slope, f.r_squared),
    )
}

fn scaling_second_order(plain: &ddsim::SweepOutcome, sym: &ddsim::SweepOutcome) -> Outcome {
    let f = sym.fit;
    let below = plain.points.iter().zip(&sym.points).all(|(p, s)| s.infidelity < p.infidelity);
    check(
        (f.slope - 4.0).abs() <= 0.8 && f.r_squared >= 0.95 && below,
        format!(
            "slope {:.3}, r^2 {:.5}, symmetric below plain at every step: {below}",
            f.slope, f.r_squared
        ),
    )
}

fn selective_decoupling() -> Outcome {
    let r = resolved(Scenario::CollectiveRegister);
    let model = r.build_model().unwrap();
    let dt = 0.05 / r.bath.cutoff;
    let e1 = simulate_pair(&r, &model, dt).unwrap().0.final_infidelity();
    let e2 = simulate_pair(&r, &model, dt / 2.0).unwrap().0.final_infidelity();
    let factor = e1 / e2;
    check(
        e1 <= 5e-3 && (3.0..=5.0).contains(&factor),
        format!("1-F(T) = {e1:.3e} at omega_c*dt = 0.05; halving factor {factor:.3}"),
    )
}

fn echo_exactness() -> Outcome {
    let mut cfg = ScenarioConfig::preset(Scenario::DephasingEcho, 7);
    cfg.bath = Some(ddsim::config::BathConfig {
        bath_operators: Some(BathOperators::Longitudinal),
        ..Default::default()
    });
    let r = ResolvedScenario::from_config(&cfg).unwrap();
    let model = r.build_model().unwrap();
    let mut worst = 0.0f64;
    for dt in [0.02, 0.04, 0.08, 0.16, 0.32] {
        let (controlled, _) = simulate_pair(&r, &model, dt).unwrap();
        worst = worst.max(controlled.final_infidelity());
    }
    check(worst <= 1e-9, format!("max terminal infidelity {worst:.2e} over 5 steps"))
}

fn run_cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_ddsim"))
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn same_files(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = std::fs::read_dir(a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in &names {
        let x = std::fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(name)).map_err(|e| format!("{name:?}: {e}"))?;
        if x != y {
            return Err(format!("{name:?} differs"));
        }
    }
    Ok(names.len())
}

fn cli_reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut compared = 0;
    for scenario in Scenario::PRESETS {
        let config = tmp.path().join(format!("{scenario}.json"));
        std::fs::write(&config, format!(r#"{{"scenario": "{scenario}", "seed": 7}}"#)).unwrap();
        for command in ["simulate", "sweep"] {
            let dirs: Vec<_> = ["a", "b"].iter().map(|r| tmp.path().join(format!("{scenario}-{command}-{r}"))).collect();
            for d in &dirs {
                let args = [command, "--config", config.to_str().unwrap(), "--out", d.to_str().unwrap()];
                if !run_cli(&args) {
                    return Err(format!("{command} failed for {scenario}"));
                }
            }
            match same_files(&dirs[0], &dirs[1]) {
                Ok(n) => compared += n,
                Err(e) => return Err(format!("{scenario} {command}: {e}")),
            }
        }
    }
    check(compared > 0, format!("{compared} files byte-identical across repeated runs of 4 presets"))
}

fn main() {
    let plain = dephasing_sweep(false);
    let symmetric = dephasing_sweep(true);
    let criteria: Vec<Criterion> = vec![
        ("projector algebra", Box::new(projector_algebra)),
        ("time average equals group average", Box::new(time_average_identity)),
        ("c-number collapse under the full Pauli group", Box::new(c_number_collapse)),
        ("commutant matches null-space oracle", Box::new(commutant_oracle)),
        ("minimal decoupling groups", Box::new(minimal_groups)),
        ("Magnus truncation orders", Box::new(magnus_orders)),
        ("symmetric cycles have no first-order term", Box::new(symmetric_oddness)),
        ("maximal averaging converges as N doubles", Box::new(maximal_convergence)),
        ("plain cycle infidelity scales as dt^2", Box::new(|| scaling_first_order(&plain))),
        ("symmetric cycle infidelity scales as dt^4", Box::new(|| scaling_second_order(&plain, &symmetric))),
        ("selective decoupling tracks projected dynamics", Box::new(selective_decoupling)),
        ("commuting-bath echo is exact", Box::new(echo_exactness)),
        ("CLI outputs are reproducible", Box::new(cli_reproducibility)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail} [{:.2}s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
