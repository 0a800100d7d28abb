//! Finite decoupling groups and the group-averaging projector
//! `Π_C(S) = (1/|G|) Σ_j g_j† S g_j` onto the commutant of the group.
//!
//! Groups are stored projectively: every element is phase-canonicalized
//! (first nonzero entry real and positive) and closure is only required up
//! to a phase. Conjugation is insensitive to phases, so this is all the
//! averaging needs.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::InteractionSpace;
use crate::operator::{Operator, C64};
use crate::pauli::{Pauli, PauliWord};
use crate::{MAX_DIM, NUMERICAL_TOL, STRUCTURAL_TOL};

/// Named Pauli-group constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PauliVariant {
    /// All K-fold tensor products of {1, X, Y, Z}; order 4^K.
    Full,
    /// {1, X̄, Ȳ, Z̄} with X̄ = X⊗…⊗X; order 4.
    Collective,
    /// {1, X̄}; order 2.
    Flip,
}

#[derive(Debug, Clone)]
pub struct DecouplingGroup {
    elements: Vec<Operator>,
    labels: Vec<String>,
    words: Option<Vec<PauliWord>>,
    pulse_labels: Option<Vec<String>>,
}

/// Multiplies by the unit phase that makes the first nonzero entry real positive.
pub fn canonicalize_phase(op: &Operator) -> Operator {
    let scale = op.max_abs().max(f64::MIN_POSITIVE);
    let first = op
        .matrix()
        .transpose()
        .iter()
        .copied()
        .find(|z| z.norm() > 1e-12 * scale);
    match first {
        Some(z) => op.scale(z.conj() / z.norm()),
        None => op.clone(),
    }
}

/// Returns `(l, phase)` with `a·b ≈ phase·elements[l]`, if any.
fn find_projective(elements: &[Operator], product: &Operator) -> Option<(usize, C64)> {
    let d = product.dim() as f64;
    elements.iter().enumerate().find_map(|(l, g)| {
        let c = g.hs_inner(product) / d;
        if (c.norm() - 1.0).abs() > 1e-6 {
            return None;
        }
        let phase = c / c.norm();
        let resid = (product - &g.scale(phase)).max_abs();
        (resid <= STRUCTURAL_TOL).then_some((l, phase))
    })
}

impl DecouplingGroup {
    /// Builds a group from explicit unitaries. The first element must be the
    /// identity up to phase; closure is verified up to phase.
    pub fn new(elements: Vec<Operator>, labels: Vec<String>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidArgument("group needs at least the identity".into()));
        }
        if labels.len() != elements.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} elements",
                labels.len(),
                elements.len()
            )));
        }
        let d = elements[0].dim();
        if let Some(g) = elements.iter().find(|g| g.dim() != d) {
            return Err(Error::DimensionMismatch(format!(
                "group element of dimension {} among dimension {d}",
                g.dim()
            )));
        }
        if let Some(r) = elements
            .iter()
            .map(Operator::unitary_residual)
            .find(|&r| r > STRUCTURAL_TOL)
        {
            return Err(Error::NotUnitary(r));
        }
        let elements: Vec<Operator> = elements.iter().map(canonicalize_phase).collect();
        let identity = Operator::identity(elements[0].dims());
        if (&elements[0] - &identity).max_abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "first group element {} is not the identity",
                labels[0]
            )));
        }
        for (j, a) in elements.iter().enumerate() {
            for (k, b) in elements.iter().enumerate() {
                if find_projective(&elements, &(a * b)).is_none() {
                    return Err(Error::NotClosed(format!(
                        "{}·{} is not an element up to phase",
                        labels[j], labels[k]
                    )));
                }
            }
        }
        Ok(Self {
            elements,
            labels,
            words: None,
            pulse_labels: None,
        })
    }

    /// Group from Pauli words; the first word must be the identity and the
    /// set must be closed under (projective) multiplication.
    pub fn from_pauli_words(words: &[PauliWord]) -> Result<Self> {
        let first = words
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Pauli word list".into()))?;
        let k = first.qubits();
        if let Some(w) = words.iter().find(|w| w.qubits() != k) {
            return Err(Error::InvalidPauliWord(format!("{w} has a different qubit count than {first}")));
        }
        if !first.is_identity() {
            return Err(Error::InvalidArgument(format!("first group element {first} is not the identity")));
        }
        if 1usize.checked_shl(k as u32).is_none_or(|d| d > MAX_DIM) {
            return Err(Error::DimensionCap {
                dim: usize::MAX,
                cap: MAX_DIM,
            });
        }
        let set: HashSet<&PauliWord> = words.iter().collect();
        if set.len() != words.len() {
            return Err(Error::InvalidArgument("repeated Pauli word in group".into()));
        }
        for a in words {
            for b in words {
                let c = a.mul_projective(b);
                if !set.contains(&c) {
                    return Err(Error::NotClosed(format!("{a}·{b} = {c} is missing")));
                }
            }
        }
        Ok(Self {
            elements: words.iter().map(|w| canonicalize_phase(&w.to_operator())).collect(),
            labels: words.iter().map(|w| w.to_string()).collect(),
            words: Some(words.to_vec()),
            pulse_labels: None,
        })
    }

    /// The one-element group on the given dimensions.
    pub fn trivial(dims: &[usize]) -> Self {
        Self {
            elements: vec![Operator::identity(dims)],
            labels: vec!["1".into()],
            words: None,
            pulse_labels: None,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn words(&self) -> Option<&[PauliWord]> {
        self.words.as_deref()
    }

    /// Pulse names for the default cyclic ordering, when the constructor
    /// provides them.
    pub fn pulse_labels(&self) -> Option<&[String]> {
        self.pulse_labels.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn dims(&self) -> &[usize] {
        self.elements[0].dims()
    }

    /// Max residual of projective closure over all pairs (`None` if not closed).
    pub fn closure_residual(&self) -> Option<f64> {
        let mut worst = 0.0f64;
        for a in &self.elements {
            for b in &self.elements {
                let p = a * b;
                let (l, phase) = find_projective(&self.elements, &p)?;
                worst = worst.max((&p - &self.elements[l].scale(phase)).max_abs());
            }
        }
        Some(worst)
    }
}

impl fmt::Display for DecouplingGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(", "))
    }
}

pub fn pauli_group(k: usize, variant: PauliVariant) -> Result<DecouplingGroup> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    let words = match variant {
        PauliVariant::Full => {
            if k > 6 {
                return Err(Error::DimensionCap {
                    dim: 1usize.checked_shl(2 * k as u32).unwrap_or(usize::MAX),
                    cap: MAX_DIM,
                });
            }
            PauliWord::all(k)
        }
        PauliVariant::Collective => [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]
            .iter()
            .map(|&p| PauliWord::uniform(p, k))
            .collect(),
        PauliVariant::Flip => vec![PauliWord::identity(k), PauliWord::uniform(Pauli::X, k)],
    };
    let mut group = DecouplingGroup::from_pauli_words(&words)?;
    if variant == PauliVariant::Collective {
        // Frames 1 → X̄ → Ȳ → Z̄ → 1 are reached by collective π pulses about
        // x, -z, -x, -z. Signs are projective phases with no physical effect.
        group.pulse_labels = Some(
            ["pi_x", "pi_-z", "pi_-x", "pi_-z"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        );
    }
    Ok(group)
}

/// `Π_C(S) = (1/|G|) Σ_j g_j† S g_j`.
pub fn project_commutant(s: &Operator, group: &DecouplingGroup) -> Result<Operator> {
    if s.dim() != group.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} averaged over a group on dimension {}",
            s.dim(),
            group.dim()
        )));
    }
    let sum = group
        .elements
        .iter()
        .fold(Operator::zeros(s.dims()), |acc, g| acc + s.conjugated_by(g));
    Ok(sum.scale_real(1.0 / group.order() as f64))
}

/// Hilbert–Schmidt orthonormal basis of the commutant.
#[derive(Debug, Clone)]
pub struct CommutantBasis {
    pub basis: Vec<Operator>,
    pub dimension: usize,
}

impl CommutantBasis {
    /// Frobenius norm of the part of `op` outside the commutant span.
    pub fn residual(&self, op: &Operator) -> f64 {
        let proj = self
            .basis
            .iter()
            .fold(Operator::zeros(op.dims()), |acc, b| acc + b.scale(b.hs_inner(op)));
        (op - &proj).frobenius_norm()
    }
}

/// Projects every matrix unit `|i><j|` and orthonormalizes the images,
/// discarding those with residual norm below 1e-8.
pub fn commutant_basis(group: &DecouplingGroup) -> CommutantBasis {
    let dims = group.dims().to_vec();
    let d = group.dim();
    let mut basis: Vec<Operator> = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let unit = Operator::matrix_unit(&dims, i, j);
            let mut v = project_commutant(&unit, group).expect("matching dimensions");
            for _ in 0..2 {
                for b in &basis {
                    v = &v - &b.scale(b.hs_inner(&v));
                }
            }
            let n = v.frobenius_norm();
            if n >= NUMERICAL_TOL {
                basis.push(v.scale_real(1.0 / n));
            }
        }
    }
    let dimension = basis.len();
    CommutantBasis { basis, dimension }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecouplingMode {
    /// Every traceless system operator is averaged to zero.
    Maximal,
    /// The interaction space is averaged out; a nontrivial commutant remains.
    Selective,
    /// Some coupling survives the averaging.
    None,
}

impl DecouplingMode {
    pub fn name(self) -> &'static str {
        match self {
            DecouplingMode::Maximal => "maximal",
            DecouplingMode::Selective => "selective",
            DecouplingMode::None => "none",
        }
    }
}

impl fmt::Display for DecouplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub label: String,
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub struct DecouplingReport {
    pub mode: DecouplingMode,
    /// ‖Π_C(S)‖ for the traceless part of each interaction-space basis element.
    pub residuals: Vec<Residual>,
    /// Largest traceless remainder of Π_C over a full operator basis.
    pub maximal_residual: f64,
    /// `Π_C(H_S)`, the effective system Hamiltonian.
    pub effective_h_s: Operator,
}

fn interaction_residuals(group: &DecouplingGroup, space: &InteractionSpace) -> Result<Vec<Residual>> {
    space
        .basis()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let p = project_commutant(&s.traceless_part(), group)?;
            Ok(Residual {
                label: format!("S[{i}]"),
                norm: p.frobenius_norm(),
            })
        })
        .collect()
}

fn interaction_passes(residuals: &[Residual]) -> bool {
    residuals.iter().all(|r| r.norm <= NUMERICAL_TOL)
}

/// Classifies `group` as maximal, selective or failing for the given
/// interaction space, and returns the projected system Hamiltonian.
pub fn check_decoupling(
    group: &DecouplingGroup,
    space: &InteractionSpace,
    h_s: &Operator,
) -> Result<DecouplingReport> {
    let residuals = interaction_residuals(group, space)?;
    let effective_h_s = project_commutant(h_s, group)?;
    let dims = group.dims().to_vec();
    let d = group.dim();
    let mut maximal_residual = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let p = project_commutant(&Operator::matrix_unit(&dims, i, j), group)?;
            maximal_residual = maximal_residual.max(p.traceless_part().frobenius_norm());
        }
    }
    let mode = if maximal_residual <= NUMERICAL_TOL {
        DecouplingMode::Maximal
    } else if interaction_passes(&residuals) {
        DecouplingMode::Selective
    } else {
        DecouplingMode::None
    };
    Ok(DecouplingReport {
        mode,
        residuals,
        maximal_residual,
        effective_h_s,
    })
}

/// A subgroup of the projective Pauli group as its sorted symplectic indices.
type IndexGroup = Vec<usize>;

fn extend_group(group: &IndexGroup, w: usize) -> IndexGroup {
    let mut out: Vec<usize> = group.iter().copied().chain(group.iter().map(|g| g ^ w)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Lexicographically smallest generator list (greedy over sorted words).
fn canonical_generators(group: &IndexGroup, k: usize) -> Vec<PauliWord> {
    let mut words: Vec<PauliWord> = group.iter().map(|&i| PauliWord::from_index(i, k)).collect();
    words.sort();
    let mut span: IndexGroup = vec![0];
    let mut gens = Vec::new();
    for w in words {
        let idx = w.to_index();
        if span.binary_search(&idx).is_err() {
            span = extend_group(&span, idx);
            gens.push(w);
        }
    }
    gens
}

/// Group elements enumerated by binary counting over the generators.
fn group_from_generators(gens: &[PauliWord], k: usize) -> Result<DecouplingGroup> {
    let words: Vec<PauliWord> = (0..1usize << gens.len())
        .map(|mask| {
            gens.iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .fold(PauliWord::identity(k), |acc, (_, g)| acc.mul_projective(g))
        })
        .collect();
    DecouplingGroup::from_pauli_words(&words)
}

/// Searches subgroups of the projective K-qubit Pauli group, smallest order
/// first, and returns every subgroup of the minimal order that averages the
/// interaction space away. Ties are ordered by generator list.
pub fn minimal_group_search(space: &InteractionSpace, k: usize, max_order: usize) -> Result<Vec<DecouplingGroup>> {
    if k == 0 || k > 3 {
        return Err(Error::InvalidArgument(format!("search supports 1 to 3 qubits, got {k}")));
    }
    if max_order == 0 || max_order > 64 {
        return Err(Error::InvalidArgument(format!("max_order must be in 1..=64, got {max_order}")));
    }
    if let Some(b) = space.basis().first() {
        if b.dim() != 1 << k {
            return Err(Error::DimensionMismatch(format!(
                "interaction space on dimension {} searched with {k} qubits",
                b.dim()
            )));
        }
    }
    let n_words = 1usize << (2 * k);
    let mut level: BTreeSet<IndexGroup> = BTreeSet::from([vec![0]]);
    let mut order = 1usize;
    while order <= max_order && !level.is_empty() {
        let candidates: Vec<&IndexGroup> = level.iter().collect();
        let hits: Vec<Vec<PauliWord>> = candidates
            .par_iter()
            .map(|g| -> Result<Option<Vec<PauliWord>>> {
                let gens = canonical_generators(g, k);
                let group = group_from_generators(&gens, k)?;
                let residuals = interaction_residuals(&group, space)?;
                Ok(interaction_passes(&residuals).then_some(gens))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        if !hits.is_empty() {
            let mut hits = hits;
            hits.sort();
            return hits.iter().map(|gens| group_from_generators(gens, k)).collect();
        }
        let mut next = BTreeSet::new();
        for g in &level {
            for w in 0..n_words {
                if g.binary_search(&w).is_err() {
                    next.insert(extend_group(g, w));
                }
            }
        }
        level = next;
        order *= 2;
    }
    Ok(Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{distance, tensor, Metric, I, ONE};
    use crate::pauli::{embed, sigma_x, sigma_y, sigma_z};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_op(rng: &mut ChaCha8Rng, dims: &[usize]) -> Operator {
        let n: usize = dims.iter().product();
        let entries: Vec<C64> = (0..n * n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Operator::from_rows(n, &entries).unwrap().with_dims(dims.to_vec()).unwrap()
    }

    fn words(ws: &[&str]) -> Vec<PauliWord> {
        ws.iter().map(|w| w.parse().unwrap()).collect()
    }

    #[test]
    fn pauli_group_orders() {
        let full = pauli_group(1, PauliVariant::Full).unwrap();
        assert_eq!(full.order(), 4);
        assert_eq!(full.labels(), &["I", "X", "Y", "Z"]);
        let coll = pauli_group(3, PauliVariant::Collective).unwrap();
        assert_eq!(coll.order(), 4);
        assert_eq!(coll.labels()[1], "XXX");
        let flip = pauli_group(2, PauliVariant::Flip).unwrap();
        assert_eq!(flip.order(), 2);
        assert_eq!(flip.elements()[1], tensor(&sigma_x(), &sigma_x()));
        assert_eq!(pauli_group(2, PauliVariant::Full).unwrap().order(), 16);
        assert!(pauli_group(7, PauliVariant::Full).is_err());
    }

    #[test]
    fn elements_are_phase_canonical_and_closed() {
        let g = pauli_group(2, PauliVariant::Full).unwrap();
        for e in g.elements() {
            assert!(e.is_unitary());
            let first = e.matrix().transpose().iter().copied().find(|z| z.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-15 && first.re > 0.0);
        }
        assert!(g.closure_residual().unwrap() <= STRUCTURAL_TOL);
    }

    #[test]
    fn explicit_matrices_checked() {
        let ok = DecouplingGroup::new(
            vec![Operator::identity(&[2]), sigma_y().scale(I)],
            vec!["1".into(), "iY".into()],
        )
        .unwrap();
        assert_eq!(ok.order(), 2);
        let not_closed = DecouplingGroup::new(
            vec![Operator::identity(&[2]), sigma_x(), sigma_z()],
            vec!["1".into(), "X".into(), "Z".into()],
        );
        assert!(matches!(not_closed, Err(Error::NotClosed(_))));
        let not_unitary = DecouplingGroup::new(
            vec![Operator::identity(&[2]), sigma_x().scale_real(2.0)],
            vec!["1".into(), "2X".into()],
        );
        assert!(not_unitary.is_err());
        assert!(DecouplingGroup::from_pauli_words(&words(&["I", "X", "Z"])).is_err());
        assert!(DecouplingGroup::from_pauli_words(&words(&["X", "I"])).is_err());
    }

    #[test]
    fn projector_on_trivial_group_is_identity_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_op(&mut rng, &[2]);
        let p = project_commutant(&s, &DecouplingGroup::trivial(&[2])).unwrap();
        assert!(distance(&p, &s, Metric::Frobenius).unwrap() < 1e-15);
    }

    #[test]
    fn flip_group_kills_sigma_z() {
        let g = pauli_group(1, PauliVariant::Flip).unwrap();
        let p = project_commutant(&sigma_z(), &g).unwrap();
        assert!(p.max_abs() < 1e-15);
    }

    #[test]
    fn full_group_collapses_to_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = pauli_group(1, PauliVariant::Full).unwrap();
        let s = random_op(&mut rng, &[2]);
        let p = project_commutant(&s, &g).unwrap();
        // explicit 4-term sum
        let explicit = [Operator::identity(&[2]), sigma_x(), sigma_y(), sigma_z()]
            .iter()
            .fold(Operator::zeros(&[2]), |acc, q| acc + &(q * &s) * q)
            .scale_real(0.25);
        let expected = Operator::identity(&[2]).scale(s.trace() / 2.0);
        assert!(distance(&p, &explicit, Metric::Frobenius).unwrap() < 1e-14);
        assert!(distance(&p, &expected, Metric::Frobenius).unwrap() < 1e-14);
    }

    #[test]
    fn projector_dimension_mismatch() {
        let g = pauli_group(2, PauliVariant::Flip).unwrap();
        assert!(project_commutant(&sigma_z(), &g).is_err());
    }

    #[test]
    fn commutant_dimensions() {
        assert_eq!(commutant_basis(&pauli_group(1, PauliVariant::Full).unwrap()).dimension, 1);
        let full = commutant_basis(&pauli_group(1, PauliVariant::Full).unwrap());
        let expected = Operator::identity(&[2]).scale_real(1.0 / 2f64.sqrt());
        let overlap = full.basis[0].hs_inner(&expected).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        assert_eq!(commutant_basis(&pauli_group(2, PauliVariant::Collective).unwrap()).dimension, 4);
        assert_eq!(commutant_basis(&DecouplingGroup::trivial(&[3])).dimension, 9);
        assert_eq!(commutant_basis(&pauli_group(1, PauliVariant::Flip).unwrap()).dimension, 2);
    }

    #[test]
    fn commutant_elements_commute() {
        let g = pauli_group(2, PauliVariant::Collective).unwrap();
        let basis = commutant_basis(&g);
        for b in &basis.basis {
            for e in g.elements() {
                assert!(b.commutator(e).max_abs() <= STRUCTURAL_TOL);
            }
        }
        let zz = tensor(&sigma_z(), &sigma_z());
        assert!(basis.residual(&zz) < 1e-10);
        assert!(basis.residual(&embed(&sigma_z(), 0, 2)) > 0.5);
    }

    #[test]
    fn decoupling_modes() {
        let k1_full = pauli_group(1, PauliVariant::Full).unwrap();
        let any = InteractionSpace::new(&[sigma_x(), sigma_y(), sigma_z()]).unwrap();
        let r = check_decoupling(&k1_full, &any, &sigma_x()).unwrap();
        assert_eq!(r.mode, DecouplingMode::Maximal);
        assert!(r.effective_h_s.max_abs() < 1e-15);

        let flip = pauli_group(1, PauliVariant::Flip).unwrap();
        let z_only = InteractionSpace::new(&[sigma_z()]).unwrap();
        let h_s = (&sigma_z() + &sigma_x()).scale_real(0.5);
        let r = check_decoupling(&flip, &z_only, &h_s).unwrap();
        assert_eq!(r.mode, DecouplingMode::Selective);
        assert!(r.residuals[0].norm < 1e-15);
        assert!(distance(&r.effective_h_s, &sigma_x().scale_real(0.5), Metric::Frobenius).unwrap() < 1e-15);

        let x_only = InteractionSpace::new(&[sigma_x()]).unwrap();
        let r = check_decoupling(&flip, &x_only, &Operator::zeros(&[2])).unwrap();
        assert_eq!(r.mode, DecouplingMode::None);
        assert!(r.residuals[0].norm > 1.0);
    }

    #[test]
    fn identity_component_of_interaction_is_ignored() {
        let flip = pauli_group(1, PauliVariant::Flip).unwrap();
        let shifted = &sigma_z() + &Operator::identity(&[2]);
        let space = InteractionSpace::new(&[shifted]).unwrap();
        let r = check_decoupling(&flip, &space, &Operator::zeros(&[2])).unwrap();
        assert_eq!(r.mode, DecouplingMode::Selective);
    }

    #[test]
    fn search_single_qubit_dephasing() {
        let space = InteractionSpace::new(&[sigma_z()]).unwrap();
        let groups = minimal_group_search(&space, 1, 64).unwrap();
        let labels: Vec<Vec<String>> = groups.iter().map(|g| g.labels().to_vec()).collect();
        assert_eq!(labels, vec![vec!["I", "X"], vec!["I", "Y"]]);
    }

    #[test]
    fn search_empty_space_returns_trivial() {
        let groups = minimal_group_search(&InteractionSpace::empty(), 2, 64).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].order(), 1);
    }

    #[test]
    fn search_full_space_needs_full_group() {
        let ops: Vec<Operator> = PauliWord::all(1).iter().skip(1).map(|w| w.to_operator()).collect();
        let space = InteractionSpace::new(&ops).unwrap();
        let groups = minimal_group_search(&space, 1, 64).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].order(), 4);
        assert!(minimal_group_search(&space, 1, 2).unwrap().is_empty());
    }

    #[test]
    fn search_rejects_caps() {
        let space = InteractionSpace::empty();
        assert!(minimal_group_search(&space, 4, 8).is_err());
        assert!(minimal_group_search(&space, 2, 128).is_err());
    }

    #[test]
    fn phase_change_leaves_projection_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = pauli_group(1, PauliVariant::Full).unwrap();
        let phased: Vec<Operator> = g
            .elements()
            .iter()
            .map(|e| e.scale(C64::from_polar(1.0, rng.random_range(0.0..6.0))))
            .collect();
        let s = random_op(&mut rng, &[2]);
        let direct = project_commutant(&s, &g).unwrap();
        let sum = phased.iter().fold(Operator::zeros(&[2]), |acc, e| acc + s.conjugated_by(e));
        let via_phased = sum.scale_real(0.25);
        assert!(distance(&direct, &via_phased, Metric::Frobenius).unwrap() < 1e-14);
        assert_eq!(project_commutant(&Operator::identity(&[2]), &g).unwrap().get(0, 0), ONE);
    }
}
