//! Counterdiabatic Hamiltonians, Schrödinger integration and trajectory
//! observables.

mod hamiltonian;
mod integrate;
mod observables;

pub use hamiltonian::{
    cavity_qed_hamiltonian, four_level_hamiltonian, hamiltonian_from_basis, hermiticity_residual,
    phased_hamiltonian, three_level_lambda, HamiltonianSource, HamiltonianSpec,
};
pub use integrate::{
    evolve, evolve_batch, EvolveJob, Trajectory, DEFAULT_STEPS, MAX_NORM_DRIFT, MIN_STEPS,
};
pub use observables::{
    bloch_coordinates, extract_theta_kappa, PhaseExtraction, LEAKAGE_THRESHOLD, PHASE_GAP_THRESHOLD,
};
