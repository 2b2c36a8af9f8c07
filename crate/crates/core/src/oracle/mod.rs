//! Exact Fock-space simulation of measurement and evolution for small systems.

mod branches;
mod fock;
mod operators;

pub use branches::{
    evolve_branches, ground_state, locality_check, log_slope, measurement_branches, one_particle_dm, oracle_entropy,
    pure_state_dm, Branch, BranchEnsemble, LocalityObservable, LocalityReport, OracleSystem,
};
pub use fock::{enumerate_fock_states, fock_dimension, FockBasis, DEFAULT_CAP};
pub use operators::{
    build_hamiltonian, hopping_operator, occupation_projector, Evolver, ManyBodyOperator, OperatorKind,
};
