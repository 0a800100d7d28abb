//! Dynamical decoupling of a small open quantum register.
//!
//! A system of qubits is coupled to a finite bath; a cyclic bang-bang
//! schedule of unitary frames drawn from a finite group averages the
//! coupling away. The crate builds the models and groups, computes the
//! averaged Hamiltonians, and propagates the joint state exactly.

pub mod error;
pub mod evolve;
pub mod group;
pub mod magnus;
pub mod model;
pub mod operator;
pub mod pauli;
pub mod sequence;

pub use error::{Error, Result};
pub use evolve::{
    cycle_propagator, estimate_rates, evolve, fidelity, fit_scaling_exponent, observable_drift, BathState,
    RateEstimate, ScalingFit, SimulationRun, TrajectoryResult,
};
pub use group::{
    check_decoupling, commutant_basis, minimal_group_search, pauli_group, project_commutant, DecouplingGroup,
    DecouplingMode, DecouplingReport, PauliVariant,
};
pub use magnus::{average_hamiltonian_series, toggled_hamiltonian, truncation_error, AverageHamiltonianSeries};
pub use model::{
    build_model, interaction_space_of, total_hamiltonian, BathKind, BathOperators, BathSpec, CouplingKind,
    InteractionSpace, SystemBathModel,
};
pub use operator::{distance, expm_hermitian, partial_trace_bath, tensor, Metric, Operator, C64};
pub use pauli::{Pauli, PauliWord};
pub use sequence::{schedule_from_group, symmetrize, CycleSchedule, ScheduleRecord};

/// Tolerance for exact algebraic identities.
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Tolerance for quantities produced by floating-point propagation.
pub const NUMERICAL_TOL: f64 = 1e-8;
/// Largest supported joint Hilbert-space dimension.
pub const MAX_DIM: usize = 4096;
