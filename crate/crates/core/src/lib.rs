//! Resonance interaction energy between two identical two-level atoms.
//!
//! The crate computes the distance-dependent energy shift produced by the
//! exchange of a resonant photon between two atoms prepared in an
//! arbitrary joint state, together with the coherence quantities that
//! control it (quantum classicality, l₁-norm coherence, concurrence).
//! A brute-force numerical-quadrature oracle evaluates the same energy
//! from the underlying frequency integral, providing an independent check
//! of the closed form.
//!
//! Modules:
//! - [`types`]: density matrices, dipoles, geometry, validation.
//! - [`tensor`]: the dipole-dipole interaction tensor and spectral kernel.
//! - [`coherence`]: Q, l₁-norm coherence, concurrence, reduced states.
//! - [`energy`]: steady and oscillating interaction energy.
//! - [`oracle`]: regulated frequency-integral evaluation of the energy.

pub mod coherence;
pub mod energy;
pub mod oracle;
mod quad;
pub mod tensor;
pub mod types;

pub use coherence::{
    concurrence, is_nonpolar, l1_coherence, quantum_classicality, reduced_state, Atom,
    CoherenceReport,
};
pub use energy::{
    atomic_correlation, dimensionless_energy, oscillating_amplitude, steady_energy,
    time_averaged_energy, AtomicCorrelation, EnergyResult,
};
pub use oracle::{
    chi_time_domain, oracle_steady_energy, oracle_term_pair, CutoffStrategy, OracleConfig,
    OracleResult,
};
pub use tensor::{
    angular_parts, chi_kernel, dipole_tensor, far_zone_tensor, near_zone_tensor, radial_parts,
    InteractionTensor, SpectralKernel,
};
pub use types::{
    pure_state, validate_state, werner_state, DomainError, Geometry, Result, StateViolation,
    Tolerances, TransitionDipole, TwoAtomState,
};
