//! Finite system–bath models `H₀ = H_S⊗1 + 1⊗H_B + Σ_α S_α⊗B_α`.
//!
//! Baths are finite discretizations: either `m` spin-1/2 modes or `m`
//! truncated harmonic modes. Mode frequencies sit on a uniform grid inside
//! `(0, ω_c]` with a seeded ±10% jitter, so the cutoff `ω_c` is the only
//! feature of the spectral density the dynamics sees.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{tensor, tensor_all, Operator, C64, I, ZERO};
use crate::pauli::{embed, sigma_x, sigma_y, sigma_z, PauliWord};
use crate::{MAX_DIM, NUMERICAL_TOL, STRUCTURAL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BathKind {
    SpinBath,
    BosonMode,
}

/// Which bath operators the couplings `B_α` are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BathOperators {
    /// σ_x, σ_y of each spin (or quadratures of each mode); does not commute with H_B.
    #[default]
    Transverse,
    /// σ_z of each spin; commutes with H_B.
    Longitudinal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub kind: BathKind,
    pub n_modes: usize,
    /// Ultraviolet cutoff ω_c (angular frequency).
    pub cutoff: f64,
    /// Coupling magnitude g (angular frequency).
    pub coupling_scale: f64,
    /// Explicit mode frequencies; drawn from the seed when absent.
    pub mode_frequencies: Option<Vec<f64>>,
    /// Fock levels per mode, boson kind only.
    pub boson_truncation: usize,
    pub bath_operators: BathOperators,
    pub seed: u64,
}

impl BathSpec {
    pub fn spin(n_modes: usize, cutoff: f64, coupling_scale: f64, seed: u64) -> Self {
        Self {
            kind: BathKind::SpinBath,
            n_modes,
            cutoff,
            coupling_scale,
            mode_frequencies: None,
            boson_truncation: 0,
            bath_operators: BathOperators::Transverse,
            seed,
        }
    }

    pub fn boson(n_modes: usize, truncation: usize, cutoff: f64, coupling_scale: f64, seed: u64) -> Self {
        Self {
            kind: BathKind::BosonMode,
            boson_truncation: truncation,
            ..Self::spin(n_modes, cutoff, coupling_scale, seed)
        }
    }

    pub fn with_bath_operators(mut self, ops: BathOperators) -> Self {
        self.bath_operators = ops;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::InvalidArgument("bath needs at least one mode".into()));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::InvalidArgument(format!("cutoff must be positive, got {}", self.cutoff)));
        }
        if !(self.coupling_scale > 0.0 && self.coupling_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coupling_scale must be positive, got {}",
                self.coupling_scale
            )));
        }
        if let Some(freqs) = &self.mode_frequencies {
            if freqs.len() != self.n_modes {
                return Err(Error::InvalidArgument(format!(
                    "{} mode frequencies for {} modes",
                    freqs.len(),
                    self.n_modes
                )));
            }
            if let Some(w) = freqs.iter().find(|&&w| !(w > 0.0 && w <= self.cutoff)) {
                return Err(Error::InvalidArgument(format!(
                    "mode frequency {w} outside (0, {}]",
                    self.cutoff
                )));
            }
        }
        if self.kind == BathKind::BosonMode && self.boson_truncation < 2 {
            return Err(Error::InvalidArgument("boson truncation needs at least 2 levels".into()));
        }
        Ok(())
    }

    /// Draws the jittered frequency grid; consumes `n_modes` draws from `rng`.
    fn draw_frequencies(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let spacing = self.cutoff / self.n_modes as f64;
        let jitter: Vec<f64> = (0..self.n_modes).map(|_| rng.random_range(-0.1..=0.1)).collect();
        match &self.mode_frequencies {
            Some(freqs) => freqs.clone(),
            None => jitter
                .iter()
                .enumerate()
                .map(|(i, u)| spacing * (i as f64 + 0.5 + u))
                .collect(),
        }
    }
}

/// Which system operators couple to the bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    /// Every traceless Pauli word, each to its own bath operator.
    Total,
    /// σ_α on each qubit separately (3K terms).
    LinearIndependent,
    /// Σ_i σ_α^(i) for α = x, y, z (3 terms).
    LinearCollective,
    /// σ_z on each qubit (K terms).
    Dephasing,
}

impl CouplingKind {
    pub fn name(self) -> &'static str {
        match self {
            CouplingKind::Total => "total",
            CouplingKind::LinearIndependent => "linear-independent",
            CouplingKind::LinearCollective => "linear-collective",
            CouplingKind::Dephasing => "dephasing",
        }
    }
}

impl fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CouplingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(Self::Total),
            "linear-independent" => Ok(Self::LinearIndependent),
            "linear-collective" => Ok(Self::LinearCollective),
            "dephasing" => Ok(Self::Dephasing),
            other => Err(Error::InvalidArgument(format!("unknown coupling kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub label: String,
    pub system: Operator,
    pub bath: Operator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemBathModel {
    h_s: Operator,
    h_b: Operator,
    couplings: Vec<Coupling>,
    cutoff: f64,
    mode_frequencies: Vec<f64>,
}

/// Rank of a list of operators under the Hilbert–Schmidt inner product.
pub fn operator_rank(ops: &[Operator]) -> usize {
    gram_schmidt(ops, NUMERICAL_TOL).len()
}

/// Indices of a maximal independent prefix-greedy subset plus the orthonormal
/// vectors spanning it.
fn gram_schmidt(ops: &[Operator], rel_tol: f64) -> Vec<(usize, Operator)> {
    let mut kept: Vec<(usize, Operator)> = Vec::new();
    for (idx, op) in ops.iter().enumerate() {
        let norm0 = op.frobenius_norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = op.scale_real(1.0 / norm0);
        // two passes for stability
        for _ in 0..2 {
            for (_, q) in &kept {
                let c = q.hs_inner(&v);
                v = &v - &q.scale(c);
            }
        }
        let n = v.frobenius_norm();
        if n > rel_tol {
            kept.push((idx, v.scale_real(1.0 / n)));
        }
    }
    kept
}

impl SystemBathModel {
    /// Assembles a model, checking Hermiticity and independence of the `B_α`.
    pub fn new(h_s: Operator, h_b: Operator, couplings: Vec<Coupling>, cutoff: f64) -> Result<Self> {
        if !h_s.is_hermitian() {
            return Err(Error::NotHermitian(h_s.hermitian_residual()));
        }
        if !h_b.is_hermitian() {
            return Err(Error::NotHermitian(h_b.hermitian_residual()));
        }
        for c in &couplings {
            if c.system.dim() != h_s.dim() || c.bath.dim() != h_b.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "coupling {} has dimensions {}x{}, model {}x{}",
                    c.label,
                    c.system.dim(),
                    c.bath.dim(),
                    h_s.dim(),
                    h_b.dim()
                )));
            }
        }
        let total_dim = h_s.dim() * h_b.dim();
        if total_dim > MAX_DIM {
            return Err(Error::DimensionCap { dim: total_dim, cap: MAX_DIM });
        }
        let baths: Vec<Operator> = couplings.iter().map(|c| c.bath.clone()).collect();
        if operator_rank(&baths) != baths.len() {
            return Err(Error::InvalidArgument(format!(
                "bath coupling operators are linearly dependent (rank {} of {})",
                operator_rank(&baths),
                baths.len()
            )));
        }
        let model = Self {
            h_s,
            h_b,
            couplings,
            cutoff,
            mode_frequencies: Vec::new(),
        };
        let h_sb = model.interaction_hamiltonian();
        if !h_sb.is_hermitian() {
            return Err(Error::NotHermitian(h_sb.hermitian_residual()));
        }
        Ok(model)
    }

    pub fn h_s(&self) -> &Operator {
        &self.h_s
    }

    pub fn h_b(&self) -> &Operator {
        &self.h_b
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn system_dims(&self) -> &[usize] {
        self.h_s.dims()
    }

    pub fn bath_dims(&self) -> &[usize] {
        self.h_b.dims()
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn mode_frequencies(&self) -> &[f64] {
        &self.mode_frequencies
    }

    pub fn total_dim(&self) -> usize {
        self.h_s.dim() * self.h_b.dim()
    }

    /// Replaces `H_S`.
    pub fn with_system_hamiltonian(mut self, h_s: Operator) -> Result<Self> {
        if h_s.dim() != self.h_s.dim() {
            return Err(Error::DimensionMismatch(format!(
                "system Hamiltonian is {}x{}, system is {}",
                h_s.dim(),
                h_s.dim(),
                self.h_s.dim()
            )));
        }
        if !h_s.is_hermitian() {
            return Err(Error::NotHermitian(h_s.hermitian_residual()));
        }
        self.h_s = h_s.with_dims(self.h_s.dims().to_vec())?;
        Ok(self)
    }

    /// `Σ_α S_α ⊗ B_α`.
    pub fn interaction_hamiltonian(&self) -> Operator {
        let mut dims = self.system_dims().to_vec();
        dims.extend_from_slice(self.bath_dims());
        self.couplings
            .iter()
            .fold(Operator::zeros(&dims), |acc, c| acc + tensor(&c.system, &c.bath))
    }

    /// The system Hamiltonian and system coupling operators only; bath parts
    /// are replaced by the given map. Used to form factor-wise averages.
    pub fn map_system_parts(&self, f: impl Fn(&Operator) -> Operator) -> Operator {
        let id_b = Operator::identity(self.bath_dims());
        let id_s = Operator::identity(self.system_dims());
        let mut h = tensor(&f(&self.h_s), &id_b) + tensor(&id_s, &self.h_b);
        for c in &self.couplings {
            h = h + tensor(&f(&c.system), &c.bath);
        }
        h
    }

    /// Ground state of `H_B` as a pure density operator.
    pub fn bath_ground_state(&self) -> Result<Operator> {
        let (_, vectors) = self.h_b.eigh()?;
        let v: Vec<C64> = vectors.column(0).iter().copied().collect();
        Operator::pure_state(self.bath_dims(), &v)
    }
}

/// `H₀ = H_S⊗1_B + 1_S⊗H_B + Σ_α S_α⊗B_α`.
pub fn total_hamiltonian(model: &SystemBathModel) -> Operator {
    model.map_system_parts(|s| s.clone())
}

fn system_couplings(k: usize, kind: CouplingKind) -> Vec<(String, Operator)> {
    let paulis = [("X", sigma_x()), ("Y", sigma_y()), ("Z", sigma_z())];
    match kind {
        CouplingKind::Dephasing => (0..k)
            .map(|i| (format!("Z{i}"), embed(&sigma_z(), i, k)))
            .collect(),
        CouplingKind::LinearIndependent => (0..k)
            .flat_map(|i| paulis.iter().map(move |(n, p)| (format!("{n}{i}"), embed(p, i, k))))
            .collect(),
        CouplingKind::LinearCollective => paulis
            .iter()
            .map(|(n, p)| {
                let sum = (0..k)
                    .map(|i| embed(p, i, k))
                    .reduce(|a, b| a + b)
                    .expect("k >= 1");
                (format!("sum {n}"), sum)
            })
            .collect(),
        CouplingKind::Total => PauliWord::all(k)
            .into_iter()
            .filter(|w| !w.is_identity())
            .map(|w| (w.to_string(), w.to_operator()))
            .collect(),
    }
}

/// Pool of Hermitian bath operators that random couplings are combined from.
fn bath_operator_pool(mode_ops: &[[Operator; 2]], mode_dims: &[usize], needed: usize) -> Vec<Operator> {
    let m = mode_dims.len();
    let place = |ops: &[(usize, &Operator)]| -> Operator {
        let ids: Vec<Operator> = mode_dims.iter().map(|&d| Operator::identity(&[d])).collect();
        let factors: Vec<&Operator> = (0..m)
            .map(|j| ops.iter().find(|(s, _)| *s == j).map(|(_, o)| *o).unwrap_or(&ids[j]))
            .collect();
        tensor_all(factors).expect("m >= 1")
    };
    let mut pool: Vec<Operator> = Vec::new();
    for (j, ops) in mode_ops.iter().enumerate() {
        for op in ops {
            pool.push(place(&[(j, op)]));
        }
    }
    if pool.len() < needed {
        'outer: for j in 0..m {
            for l in j + 1..m {
                for a in &mode_ops[j] {
                    for b in &mode_ops[l] {
                        pool.push(place(&[(j, a), (l, b)]));
                        if pool.len() >= needed {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    pool
}

fn random_combination(pool: &[Operator], scale: f64, rng: &mut ChaCha8Rng) -> Operator {
    let coeffs: Vec<f64> = pool.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    pool.iter()
        .zip(&coeffs)
        .fold(Operator::zeros(pool[0].dims()), |acc, (p, c)| acc + p.scale_real(scale * c / norm))
}

/// K qubits coupled to a bath of `n_modes` spin-1/2 modes with
/// `H_B = Σ_i (ω_i/2) σ_z^(i)`. `H_S` is zero; set it with
/// [`SystemBathModel::with_system_hamiltonian`].
pub fn build_spin_bath_model(k: usize, spec: &BathSpec, coupling_kind: CouplingKind) -> Result<SystemBathModel> {
    spec.validate()?;
    if spec.kind != BathKind::SpinBath {
        return Err(Error::InvalidArgument("spin-bath builder needs a spin-bath spec".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one system qubit".into()));
    }
    let qubits = k + spec.n_modes;
    if qubits > 12 {
        return Err(Error::DimensionCap {
            dim: 1usize.checked_shl(qubits as u32).unwrap_or(usize::MAX),
            cap: MAX_DIM,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let freqs = spec.draw_frequencies(&mut rng);
    let m = spec.n_modes;
    let mode_dims = vec![2; m];

    let h_b = freqs
        .iter()
        .enumerate()
        .map(|(i, w)| embed(&sigma_z(), i, m).scale_real(w / 2.0))
        .reduce(|a, b| a + b)
        .expect("m >= 1");

    let mode_ops: Vec<[Operator; 2]> = (0..m)
        .map(|_| match spec.bath_operators {
            BathOperators::Transverse => [sigma_x(), sigma_y()],
            BathOperators::Longitudinal => [sigma_z(), sigma_z()],
        })
        .collect();
    let system = system_couplings(k, coupling_kind);
    let pool = match spec.bath_operators {
        BathOperators::Transverse => bath_operator_pool(&mode_ops, &mode_dims, system.len()),
        BathOperators::Longitudinal => longitudinal_pool(m, system.len()),
    };
    finish_model(k, spec, system, pool, h_b, freqs, &mut rng)
}

fn longitudinal_pool(m: usize, needed: usize) -> Vec<Operator> {
    let mut pool: Vec<Operator> = (0..m).map(|j| embed(&sigma_z(), j, m)).collect();
    'outer: for j in 0..m {
        for l in j + 1..m {
            if pool.len() >= needed {
                break 'outer;
            }
            pool.push(&embed(&sigma_z(), j, m) * &embed(&sigma_z(), l, m));
        }
    }
    pool
}

fn finish_model(
    k: usize,
    spec: &BathSpec,
    system: Vec<(String, Operator)>,
    pool: Vec<Operator>,
    h_b: Operator,
    freqs: Vec<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<SystemBathModel> {
    if pool.len() < system.len() {
        return Err(Error::InvalidArgument(format!(
            "bath of {} modes cannot supply {} independent coupling operators",
            spec.n_modes,
            system.len()
        )));
    }
    let couplings = system
        .into_iter()
        .map(|(label, s)| Coupling {
            label,
            system: s,
            bath: random_combination(&pool, spec.coupling_scale, rng),
        })
        .collect();
    let h_s = Operator::zeros(&vec![2; k]);
    let mut model = SystemBathModel::new(h_s, h_b, couplings, spec.cutoff)?;
    model.mode_frequencies = freqs;
    Ok(model)
}

/// K qubits each dephased by a bath of truncated harmonic modes,
/// `H_B = Σ_i ω_i a_i†a_i`.
pub fn build_boson_dephasing_model(k: usize, spec: &BathSpec) -> Result<SystemBathModel> {
    spec.validate()?;
    if spec.kind != BathKind::BosonMode {
        return Err(Error::InvalidArgument("boson builder needs a boson-mode spec".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one system qubit".into()));
    }
    let levels = spec.boson_truncation;
    let bath_dim = (0..spec.n_modes).try_fold(1usize, |acc, _| acc.checked_mul(levels));
    match bath_dim.and_then(|d| d.checked_mul(1 << k.min(20))) {
        Some(d) if d <= MAX_DIM && k <= 12 => {}
        other => {
            return Err(Error::DimensionCap {
                dim: other.unwrap_or(usize::MAX),
                cap: MAX_DIM,
            })
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let freqs = spec.draw_frequencies(&mut rng);
    let m = spec.n_modes;
    let mode_dims = vec![levels; m];

    let mut lower_entries = vec![ZERO; levels * levels];
    for n in 1..levels {
        lower_entries[(n - 1) * levels + n] = C64::new((n as f64).sqrt(), 0.0);
    }
    let lower = Operator::from_rows(levels, &lower_entries)?;
    let raise = lower.dagger();
    let number = &raise * &lower;
    let position = &lower + &raise;
    let momentum = (&raise - &lower).scale(I);

    let place = |op: &Operator, j: usize| -> Operator {
        let ids: Vec<Operator> = mode_dims.iter().map(|&d| Operator::identity(&[d])).collect();
        tensor_all((0..m).map(|i| if i == j { op } else { &ids[i] })).expect("m >= 1")
    };
    let h_b = freqs
        .iter()
        .enumerate()
        .map(|(j, w)| place(&number, j).scale_real(*w))
        .reduce(|a, b| a + b)
        .expect("m >= 1");
    let pool: Vec<Operator> = match spec.bath_operators {
        BathOperators::Transverse => (0..m)
            .flat_map(|j| [place(&position, j), place(&momentum, j)])
            .collect(),
        BathOperators::Longitudinal => (0..m).map(|j| place(&number, j)).collect(),
    };
    let system = system_couplings(k, CouplingKind::Dephasing);
    finish_model(k, spec, system, pool, h_b, freqs, &mut rng)
}

/// Dispatches on the bath kind. Boson baths support dephasing coupling only.
pub fn build_model(k: usize, spec: &BathSpec, coupling_kind: CouplingKind) -> Result<SystemBathModel> {
    match spec.kind {
        BathKind::SpinBath => build_spin_bath_model(k, spec, coupling_kind),
        BathKind::BosonMode if coupling_kind == CouplingKind::Dephasing => build_boson_dephasing_model(k, spec),
        BathKind::BosonMode => Err(Error::InvalidArgument(format!(
            "boson-mode baths support dephasing coupling only, got {coupling_kind}"
        ))),
    }
}

/// Linearly independent, self-adjoint span of system coupling operators.
#[derive(Debug, Clone)]
pub struct InteractionSpace {
    basis: Vec<Operator>,
    orthonormal: Vec<Operator>,
}

impl InteractionSpace {
    /// Drops linearly dependent entries (input order kept) and checks the
    /// span is closed under the adjoint.
    pub fn new(ops: &[Operator]) -> Result<Self> {
        let kept = gram_schmidt(ops, NUMERICAL_TOL);
        let basis: Vec<Operator> = kept.iter().map(|(i, _)| ops[*i].clone()).collect();
        let orthonormal: Vec<Operator> = kept.into_iter().map(|(_, q)| q).collect();
        let space = Self { basis, orthonormal };
        for b in &space.basis {
            let adj = b.dagger();
            let resid = space.residual(&adj);
            if resid > STRUCTURAL_TOL * adj.frobenius_norm().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "interaction space is not self-adjoint (residual {resid:.3e})"
                )));
            }
        }
        Ok(space)
    }

    pub fn empty() -> Self {
        Self {
            basis: Vec::new(),
            orthonormal: Vec::new(),
        }
    }

    /// Span of Pauli words.
    pub fn from_words(words: &[PauliWord]) -> Result<Self> {
        let ops: Vec<Operator> = words.iter().map(|w| w.to_operator()).collect();
        Self::new(&ops)
    }

    pub fn basis(&self) -> &[Operator] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Frobenius norm of the component of `op` orthogonal to the span.
    pub fn residual(&self, op: &Operator) -> f64 {
        let proj = self
            .orthonormal
            .iter()
            .fold(Operator::zeros(op.dims()), |acc, q| acc + q.scale(q.hs_inner(op)));
        (op - &proj).frobenius_norm()
    }
}

pub fn interaction_space_of(model: &SystemBathModel) -> InteractionSpace {
    let ops: Vec<Operator> = model.couplings.iter().map(|c| c.system.clone()).collect();
    // Couplings are Hermitian, so their span is self-adjoint.
    InteractionSpace::new(&ops).expect("Hermitian couplings span a self-adjoint space")
}
