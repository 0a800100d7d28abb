//! Scenario configuration: a single JSON document, with named presets
//! supplying defaults for any field left out.

use std::fmt;
use std::path::{Path, PathBuf};

use decoupling::group::{pauli_group, DecouplingGroup, PauliVariant};
use decoupling::model::{build_model, BathKind, BathOperators, BathSpec, CouplingKind, SystemBathModel};
use decoupling::operator::{tensor_all, Operator, C64};
use decoupling::pauli::PauliWord;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    DephasingEcho,
    CollectiveRegister,
    MaximalAveraging,
    SelectiveLogic,
    Custom,
}

impl Scenario {
    pub const PRESETS: [Scenario; 4] = [
        Scenario::DephasingEcho,
        Scenario::CollectiveRegister,
        Scenario::MaximalAveraging,
        Scenario::SelectiveLogic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::DephasingEcho => "dephasing-echo",
            Scenario::CollectiveRegister => "collective-register",
            Scenario::MaximalAveraging => "maximal-averaging",
            Scenario::SelectiveLogic => "selective-logic",
            Scenario::Custom => "custom",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub kind: Option<BathKind>,
    pub n_modes: Option<usize>,
    pub cutoff: Option<f64>,
    pub coupling_scale: Option<f64>,
    pub mode_frequencies: Option<Vec<f64>>,
    pub boson_truncation: Option<usize>,
    pub bath_operators: Option<BathOperators>,
}

/// One term `coefficient · word` of the system Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianTerm {
    pub word: String,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupConfig {
    /// `trivial`, `flip`, `collective` or `full`.
    Named(String),
    /// Explicit Pauli words; the first must be the identity.
    Words(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    #[serde(default)]
    pub qubits: Option<usize>,
    #[serde(default)]
    pub coupling: Option<CouplingKind>,
    #[serde(default)]
    pub bath: Option<BathConfig>,
    #[serde(default)]
    pub system_hamiltonian: Option<Vec<HamiltonianTerm>>,
    #[serde(default)]
    pub group: Option<GroupConfig>,
    #[serde(default)]
    pub delta_t: Option<f64>,
    #[serde(default)]
    pub n_cycles: Option<u64>,
    /// Fixed evolution time; overrides `n_cycles` when both are given.
    #[serde(default)]
    pub total_time: Option<f64>,
    #[serde(default)]
    pub symmetric: Option<bool>,
    #[serde(default)]
    pub sample_every: Option<u64>,
    /// Product state, one of `0 1 + -` per qubit.
    #[serde(default)]
    pub initial_state: Option<String>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn preset(scenario: Scenario, seed: u64) -> Self {
        Self {
            scenario,
            seed,
            qubits: None,
            coupling: None,
            bath: None,
            system_hamiltonian: None,
            group: None,
            delta_t: None,
            n_cycles: None,
            total_time: None,
            symmetric: None,
            sample_every: None,
            initial_state: None,
            sweep: None,
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config("$", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Frozen defaults for a named scenario.
struct Preset {
    qubits: usize,
    coupling: CouplingKind,
    bath: BathSpec,
    system_hamiltonian: Vec<(&'static str, f64)>,
    group: &'static str,
    delta_t: f64,
    total_time: f64,
    initial_state: &'static str,
    sweep: Option<Vec<f64>>,
}

fn preset(scenario: Scenario, seed: u64) -> Option<Preset> {
    let p = match scenario {
        Scenario::DephasingEcho => Preset {
            qubits: 1,
            coupling: CouplingKind::Dephasing,
            bath: BathSpec::spin(4, 1.0, 0.5, seed),
            system_hamiltonian: vec![],
            group: "flip",
            delta_t: 0.1,
            total_time: 25.6,
            initial_state: "+",
            sweep: Some(vec![0.02, 0.04, 0.08, 0.16]),
        },
        Scenario::CollectiveRegister => Preset {
            qubits: 2,
            coupling: CouplingKind::LinearCollective,
            bath: BathSpec::spin(4, 1.0, 0.3, seed),
            system_hamiltonian: vec![("ZZ", 0.5), ("ZI", 0.3)],
            group: "collective",
            delta_t: 0.05,
            total_time: 4.0,
            initial_state: "++",
            sweep: Some(vec![0.0125, 0.025, 0.05, 0.1]),
        },
        Scenario::MaximalAveraging => Preset {
            qubits: 1,
            coupling: CouplingKind::Total,
            bath: BathSpec::spin(4, 1.0, 0.5, seed),
            system_hamiltonian: vec![("X", 0.2)],
            group: "full",
            delta_t: 0.04,
            total_time: 4.0,
            initial_state: "+",
            sweep: Some(vec![0.005, 0.01, 0.02, 0.04]),
        },
        Scenario::SelectiveLogic => Preset {
            qubits: 2,
            coupling: CouplingKind::LinearIndependent,
            bath: BathSpec::spin(4, 1.0, 0.3, seed),
            system_hamiltonian: vec![("XX", 0.4)],
            group: "collective",
            delta_t: 0.05,
            total_time: 4.0,
            initial_state: "00",
            sweep: Some(vec![0.0125, 0.025, 0.05, 0.1]),
        },
        Scenario::Custom => return None,
    };
    Some(p)
}

/// Fully specified scenario with every default applied and every field validated.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub scenario: Scenario,
    pub seed: u64,
    pub qubits: usize,
    pub coupling: CouplingKind,
    pub bath: BathSpec,
    pub system_hamiltonian: Vec<HamiltonianTerm>,
    pub group_name: String,
    pub group: DecouplingGroup,
    pub delta_t: f64,
    pub total_time: f64,
    pub symmetric: bool,
    pub sample_every: u64,
    pub initial_state: String,
    pub rho_s0: Operator,
    pub sweep: Option<Vec<f64>>,
    pub output_dir: Option<PathBuf>,
}

fn require<T>(value: Option<T>, path: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::config(path, "required for the custom scenario"))
}

fn positive(value: f64, path: &str) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::config(path, format!("must be positive and finite, got {value}")))
    }
}

impl ResolvedScenario {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self, CliError> {
        let p = preset(cfg.scenario, cfg.seed);
        let qubits = match (cfg.qubits, &p) {
            (Some(k), _) => k,
            (None, Some(p)) => p.qubits,
            (None, None) => require(None, "qubits")?,
        };
        if qubits == 0 {
            return Err(CliError::config("qubits", "must be at least 1"));
        }
        let coupling = match (cfg.coupling, &p) {
            (Some(c), _) => c,
            (None, Some(p)) => p.coupling,
            (None, None) => require(None, "coupling")?,
        };
        let bath = resolve_bath(cfg, p.as_ref())?;

        let system_hamiltonian = match (&cfg.system_hamiltonian, &p) {
            (Some(terms), _) => terms.clone(),
            (None, Some(p)) => p
                .system_hamiltonian
                .iter()
                .map(|(w, c)| HamiltonianTerm {
                    word: w.to_string(),
                    coefficient: *c,
                })
                .collect(),
            (None, None) => Vec::new(),
        };
        for (i, t) in system_hamiltonian.iter().enumerate() {
            let w = parse_word(&t.word, &format!("system_hamiltonian[{i}].word"))?;
            if w.qubits() != qubits {
                return Err(CliError::config(
                    format!("system_hamiltonian[{i}].word"),
                    format!("{} acts on {} qubits, expected {qubits}", t.word, w.qubits()),
                ));
            }
            if !t.coefficient.is_finite() {
                return Err(CliError::config(format!("system_hamiltonian[{i}].coefficient"), "must be finite"));
            }
        }

        let group_cfg = match (&cfg.group, &p) {
            (Some(g), _) => g.clone(),
            (None, Some(p)) => GroupConfig::Named(p.group.to_string()),
            (None, None) => require(None, "group")?,
        };
        let (group_name, group) = resolve_group(&group_cfg, qubits)?;

        let delta_t = positive(
            match (cfg.delta_t, &p) {
                (Some(d), _) => d,
                (None, Some(p)) => p.delta_t,
                (None, None) => require(None, "delta_t")?,
            },
            "delta_t",
        )?;
        let symmetric = cfg.symmetric.unwrap_or(false);
        let cycle_units = group.order() as f64 * if symmetric { 2.0 } else { 1.0 };
        let total_time = match (cfg.total_time, cfg.n_cycles, &p) {
            (Some(t), _, _) => positive(t, "total_time")?,
            (None, Some(0), _) => return Err(CliError::config("n_cycles", "must be at least 1")),
            (None, Some(n), _) => n as f64 * cycle_units * delta_t,
            (None, None, Some(p)) => p.total_time,
            (None, None, None) => return Err(CliError::config("n_cycles", "custom scenario needs n_cycles or total_time")),
        };
        let sample_every = cfg.sample_every.unwrap_or(1);
        if sample_every == 0 {
            return Err(CliError::config("sample_every", "must be at least 1"));
        }

        let initial_state = match (&cfg.initial_state, &p) {
            (Some(s), _) => s.clone(),
            (None, Some(p)) => p.initial_state.to_string(),
            (None, None) => "+".repeat(qubits),
        };
        let rho_s0 = product_state(&initial_state, qubits)?;

        let sweep = match (&cfg.sweep, &p) {
            (Some(s), _) => {
                if s.parameter != "delta_t" {
                    return Err(CliError::config(
                        "sweep.parameter",
                        format!("only delta_t can be swept, got {:?}", s.parameter),
                    ));
                }
                for (i, v) in s.values.iter().enumerate() {
                    positive(*v, &format!("sweep.values[{i}]"))?;
                }
                Some(s.values.clone())
            }
            (None, Some(p)) => p.sweep.clone(),
            (None, None) => None,
        };

        Ok(Self {
            scenario: cfg.scenario,
            seed: cfg.seed,
            qubits,
            coupling,
            bath,
            system_hamiltonian,
            group_name,
            group,
            delta_t,
            total_time,
            symmetric,
            sample_every,
            initial_state,
            rho_s0,
            sweep,
            output_dir: cfg.output_dir.clone(),
        })
    }

    pub fn system_hamiltonian_operator(&self) -> Operator {
        let dims = vec![2; self.qubits];
        self.system_hamiltonian.iter().fold(Operator::zeros(&dims), |acc, t| {
            let w: PauliWord = t.word.parse().expect("validated word");
            acc + w.to_operator().scale_real(t.coefficient)
        })
    }

    pub fn build_model(&self) -> Result<SystemBathModel, CliError> {
        let model = build_model(self.qubits, &self.bath, self.coupling)?;
        Ok(model.with_system_hamiltonian(self.system_hamiltonian_operator())?)
    }

    /// Number of whole cycles covering `total_time` at the given step.
    pub fn cycles_for(&self, delta_t: f64) -> Result<u64, CliError> {
        let tc = delta_t * self.group.order() as f64 * if self.symmetric { 2.0 } else { 1.0 };
        let n = (self.total_time / tc).round();
        if n < 1.0 {
            return Err(CliError::config(
                "total_time",
                format!("{} is shorter than one cycle ({tc})", self.total_time),
            ));
        }
        if (n * tc - self.total_time).abs() > 1e-6 * self.total_time {
            return Err(CliError::config(
                "total_time",
                format!("{} is not a whole number of cycles of length {tc}", self.total_time),
            ));
        }
        Ok(n as u64)
    }
}

fn resolve_bath(cfg: &ScenarioConfig, p: Option<&Preset>) -> Result<BathSpec, CliError> {
    let given = cfg.bath.clone().unwrap_or_default();
    let mut spec = match p {
        Some(p) => p.bath.clone(),
        None => BathSpec::spin(
            require(given.n_modes, "bath.n_modes")?,
            require(given.cutoff, "bath.cutoff")?,
            require(given.coupling_scale, "bath.coupling_scale")?,
            cfg.seed,
        ),
    };
    spec.seed = cfg.seed;
    if let Some(kind) = given.kind {
        spec.kind = kind;
    }
    if let Some(m) = given.n_modes {
        spec.n_modes = m;
    }
    if let Some(c) = given.cutoff {
        spec.cutoff = c;
    }
    if let Some(g) = given.coupling_scale {
        spec.coupling_scale = g;
    }
    if let Some(f) = given.mode_frequencies {
        spec.mode_frequencies = Some(f);
    }
    if let Some(t) = given.boson_truncation {
        spec.boson_truncation = t;
    }
    if let Some(o) = given.bath_operators {
        spec.bath_operators = o;
    }
    spec.validate().map_err(|e| CliError::config("bath", e.to_string()))?;
    Ok(spec)
}

fn parse_word(text: &str, path: &str) -> Result<PauliWord, CliError> {
    text.parse().map_err(|e: decoupling::Error| CliError::config(path, e.to_string()))
}

fn resolve_group(cfg: &GroupConfig, qubits: usize) -> Result<(String, DecouplingGroup), CliError> {
    match cfg {
        GroupConfig::Named(name) => {
            let group = match name.as_str() {
                "trivial" => DecouplingGroup::trivial(&vec![2; qubits]),
                "flip" => pauli_group(qubits, PauliVariant::Flip)?,
                "collective" => pauli_group(qubits, PauliVariant::Collective)?,
                "full" => pauli_group(qubits, PauliVariant::Full).map_err(|e| CliError::config("group", e.to_string()))?,
                other => {
                    return Err(CliError::config(
                        "group",
                        format!("unknown group {other:?}; expected trivial, flip, collective or full"),
                    ))
                }
            };
            Ok((name.clone(), group))
        }
        GroupConfig::Words(words) => {
            let parsed = words
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let word = parse_word(w, &format!("group[{i}]"))?;
                    if word.qubits() != qubits {
                        return Err(CliError::config(
                            format!("group[{i}]"),
                            format!("{w} acts on {} qubits, expected {qubits}", word.qubits()),
                        ));
                    }
                    Ok(word)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let group = DecouplingGroup::from_pauli_words(&parsed).map_err(|e| CliError::config("group", e.to_string()))?;
            Ok((words.join(","), group))
        }
    }
}

/// Product of single-qubit kets named by `0 1 + -`.
pub fn product_state(spec: &str, qubits: usize) -> Result<Operator, CliError> {
    let chars: Vec<char> = spec.chars().collect();
    if chars.len() != qubits {
        return Err(CliError::config(
            "initial_state",
            format!("{spec:?} names {} qubits, expected {qubits}", chars.len()),
        ));
    }
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let kets = chars
        .iter()
        .map(|c| {
            let amps = match c {
                '0' => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                '1' => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
                '+' => [h, h],
                '-' => [h, -h],
                other => {
                    return Err(CliError::config(
                        "initial_state",
                        format!("unknown qubit state {other:?}; use 0, 1, + or -"),
                    ))
                }
            };
            Ok(Operator::pure_state(&[2], &amps)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(tensor_all(&kets).expect("at least one qubit"))
}
