//! Piecewise-constant bang-bang schedules: the control frame is held at
//! `g_j` for one interval of length Δt, and frames change by instantaneous
//! pulses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{canonicalize_phase, DecouplingGroup};
use crate::operator::Operator;
use crate::pauli::{Pauli, PauliWord};
use crate::STRUCTURAL_TOL;

/// One constant-frame interval lasting `multiplier · Δt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub frame: Operator,
    pub label: String,
    pub multiplier: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleSchedule {
    delta_t: f64,
    segments: Vec<Segment>,
    symmetric: bool,
    ordering: Vec<usize>,
    source_group_labels: Vec<String>,
    source_words: Option<Vec<PauliWord>>,
    pulse_labels: Option<Vec<String>>,
}

/// JSON-shaped description of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleRecord {
    pub group: Vec<String>,
    pub delta_t: f64,
    pub ordering: Vec<usize>,
    pub symmetric: bool,
}

impl CycleSchedule {
    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    pub fn source_group_labels(&self) -> &[String] {
        &self.source_group_labels
    }

    /// Total number of Δt units in one cycle.
    pub fn total_units(&self) -> u64 {
        self.segments.iter().map(|s| s.multiplier as u64).sum()
    }

    pub fn duration(&self, j: usize) -> f64 {
        self.delta_t * self.segments[j].multiplier as f64
    }

    /// T_c = Δt · Σ multipliers.
    pub fn cycle_time(&self) -> f64 {
        self.delta_t * self.total_units() as f64
    }

    pub fn system_dims(&self) -> &[usize] {
        self.segments[0].frame.dims()
    }

    /// Same frames and ordering at a different Δt.
    pub fn with_delta_t(&self, delta_t: f64) -> Result<Self> {
        check_delta_t(delta_t)?;
        Ok(Self {
            delta_t,
            ..self.clone()
        })
    }

    /// Serializable description; only available for Pauli-word groups.
    pub fn record(&self) -> Option<ScheduleRecord> {
        let words = self.source_words.as_ref()?;
        Some(ScheduleRecord {
            group: words.iter().map(|w| w.to_string()).collect(),
            delta_t: self.delta_t,
            ordering: self.ordering.clone(),
            symmetric: self.symmetric,
        })
    }

    pub fn from_record(record: &ScheduleRecord) -> Result<Self> {
        let words = record
            .group
            .iter()
            .map(|w| w.parse())
            .collect::<Result<Vec<PauliWord>>>()?;
        let group = DecouplingGroup::from_pauli_words(&words)?;
        let s = schedule_from_group(&group, record.delta_t, Some(&record.ordering))?;
        Ok(if record.symmetric { symmetrize(&s) } else { s })
    }
}

fn check_delta_t(delta_t: f64) -> Result<()> {
    if delta_t > 0.0 && delta_t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("delta_t must be positive, got {delta_t}")))
    }
}

/// One interval per group element, visited in `ordering` (default: the
/// group's own element order).
pub fn schedule_from_group(group: &DecouplingGroup, delta_t: f64, ordering: Option<&[usize]>) -> Result<CycleSchedule> {
    check_delta_t(delta_t)?;
    let n = group.order();
    let ordering: Vec<usize> = match ordering {
        None => (0..n).collect(),
        Some(p) => {
            let mut seen = vec![false; n];
            if p.len() != n || p.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::InvalidArgument(format!(
                    "ordering {p:?} is not a permutation of 0..{n}"
                )));
            }
            p.to_vec()
        }
    };
    let default_order = ordering.iter().enumerate().all(|(i, &p)| i == p);
    let segments = ordering
        .iter()
        .map(|&i| Segment {
            frame: group.elements()[i].clone(),
            label: group.labels()[i].clone(),
            multiplier: 1,
        })
        .collect();
    Ok(CycleSchedule {
        delta_t,
        segments,
        symmetric: false,
        ordering,
        source_group_labels: group.labels().to_vec(),
        source_words: group.words().map(|w| w.to_vec()),
        pulse_labels: if default_order {
            group.pulse_labels().map(|l| l.to_vec())
        } else {
            None
        },
    })
}

/// Palindrome `[g_0 … g_{n-1} g_{n-1} … g_0]` with Δt unchanged, so the
/// cycle time doubles. Adjacent equal frames are kept as separate segments.
pub fn symmetrize(s: &CycleSchedule) -> CycleSchedule {
    let mut segments = s.segments.clone();
    segments.extend(s.segments.iter().rev().cloned());
    CycleSchedule {
        segments,
        symmetric: true,
        pulse_labels: None,
        ..s.clone()
    }
}

/// `P_j = g_{j+1} g_j†` for every segment boundary, closing with
/// `P_{n-1} = g_0 g_{n-1}†`.
pub fn boundary_pulses(s: &CycleSchedule) -> Vec<Operator> {
    let n = s.segments.len();
    (0..n)
        .map(|j| {
            let next = &s.segments[(j + 1) % n].frame;
            next * &s.segments[j].frame.dagger()
        })
        .collect()
}

/// Names a unitary as a Pauli word up to phase, or `None`.
pub fn identify_pauli(op: &Operator) -> Option<PauliWord> {
    if op.dims().iter().any(|&d| d != 2) || op.dims().len() > 6 {
        return None;
    }
    let k = op.dims().len();
    let canon = canonicalize_phase(op);
    PauliWord::all(k)
        .into_iter()
        .find(|w| (&canonicalize_phase(&w.to_operator()) - &canon).max_abs() <= STRUCTURAL_TOL)
}

/// Human-readable pulse names: `id` for no pulse, `pi_x` etc. for a
/// collective π rotation, the Pauli word for other Pauli pulses.
pub fn pulse_program(s: &CycleSchedule) -> Vec<String> {
    if let Some(labels) = &s.pulse_labels {
        return labels.clone();
    }
    boundary_pulses(s)
        .iter()
        .map(|p| match identify_pauli(p) {
            Some(w) if w.is_identity() => "id".to_string(),
            Some(w) => {
                let first = w.letters()[0];
                if w.letters().iter().all(|&l| l == first) {
                    let axis = match first {
                        Pauli::X => "x",
                        Pauli::Y => "y",
                        Pauli::Z => "z",
                        Pauli::I => unreachable!("non-identity word"),
                    };
                    format!("pi_{axis}")
                } else {
                    w.to_string()
                }
            }
            None if (p - &Operator::identity(p.dims())).max_abs() <= STRUCTURAL_TOL => "id".to_string(),
            None => "U".to_string(),
        })
        .collect()
}
