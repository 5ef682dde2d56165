//! Coherence and entanglement quantities of the two-atom state: quantum
//! classicality Q, l₁-norm coherence, two-qubit concurrence, reduced
//! single-atom states, and the nonpolar check.
//!
//! Q = Re ρ₂₃ is the real part of the single-excitation coherence; it is
//! the only feature of the state the steady interaction energy depends on
//! when both atoms share the same dipole. The l₁-norm bounds it
//! (|Q| ≤ l₁/2) but does not determine it, and the concurrence is
//! independent of it altogether: separable states with Q ≠ 0 interact,
//! entangled states with Q = 0 do not.

use crate::types::{Tolerances, TransitionDipole, TwoAtomState};
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

/// Which atom a single-atom quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    A,
    B,
}

/// Quantum classicality Q = Re ρ₂₃, the real part of the coherence
/// between |eg⟩ and |ge⟩.
pub fn quantum_classicality(rho: &TwoAtomState) -> f64 {
    rho.rho23().re
}

/// l₁-norm coherence: the sum of moduli of all twelve off-diagonal
/// elements in the fixed basis.
pub fn l1_coherence(rho: &TwoAtomState) -> f64 {
    let m = rho.matrix();
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                sum += m[(i, j)].norm();
            }
        }
    }
    sum
}

/// Spin-flip matrix σ_y ⊗ σ_y in the fixed basis: antidiag(−1, 1, 1, −1).
fn spin_flip() -> Matrix4<Complex64> {
    let mut f = Matrix4::zeros();
    f[(0, 3)] = Complex64::new(-1.0, 0.0);
    f[(1, 2)] = Complex64::new(1.0, 0.0);
    f[(2, 1)] = Complex64::new(1.0, 0.0);
    f[(3, 0)] = Complex64::new(-1.0, 0.0);
    f
}

/// Hermitian square root of a positive-semidefinite Hermitian matrix.
/// Negative round-off eigenvalues are clamped to zero.
fn hermitian_sqrt(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let eig = m.symmetric_eigen();
    let mut d = Matrix4::zeros();
    for k in 0..4 {
        d[(k, k)] = Complex64::new(eig.eigenvalues[k].max(0.0).sqrt(), 0.0);
    }
    eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Two-qubit concurrence via the spin-flip construction:
/// C = max{0, λ₁ − λ₂ − λ₃ − λ₄}, with λ_k the decreasingly ordered
/// square roots of the eigenvalues of ρ ρ̃ and ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
///
/// ρ ρ̃ shares its spectrum with the Hermitian product √ρ ρ̃ √ρ, so only
/// Hermitian eigenproblems are solved.
pub fn concurrence(rho: &TwoAtomState) -> f64 {
    let m = rho.matrix();
    let f = spin_flip();
    let rho_tilde = f * m.conjugate() * f;
    let sqrt_rho = hermitian_sqrt(m);
    let product = sqrt_rho * rho_tilde * sqrt_rho;
    let mut lambdas: Vec<f64> = product
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|ev| ev.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0)
}

/// Partial trace over the other atom, in the single-atom basis {|e⟩, |g⟩}.
pub fn reduced_state(rho: &TwoAtomState, atom: Atom) -> Matrix2<Complex64> {
    let m = rho.matrix();
    let mut out = Matrix2::zeros();
    // joint index = 2a + b with a = atom A level, b = atom B level (0 = e).
    match atom {
        Atom::A => {
            for a in 0..2 {
                for ap in 0..2 {
                    out[(a, ap)] = m[(2 * a, 2 * ap)] + m[(2 * a + 1, 2 * ap + 1)];
                }
            }
        }
        Atom::B => {
            for b in 0..2 {
                for bp in 0..2 {
                    out[(b, bp)] = m[(b, bp)] + m[(2 + b, 2 + bp)];
                }
            }
        }
    }
    out
}

/// Whether the chosen atom carries no mean dipole moment in the given
/// state: max_i |⟨D_i⟩| ≤ tol_zero·|d|, with
/// ⟨D_i⟩ = Tr(ρ_reduced D_i) = d_i ρ_eg + conj(d_i) ρ_ge.
pub fn is_nonpolar(
    rho: &TwoAtomState,
    d: &TransitionDipole,
    atom: Atom,
    tol: &Tolerances,
) -> bool {
    let reduced = reduced_state(rho, atom);
    let rho_eg = reduced[(0, 1)];
    let rho_ge = reduced[(1, 0)];
    let max_moment = d
        .components()
        .iter()
        .map(|di| (di * rho_eg + di.conj() * rho_ge).norm())
        .fold(0.0f64, f64::max);
    max_moment <= tol.tol_zero * d.norm()
}

/// All coherence quantities of one state, evaluated together.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    /// Quantum classicality Q = Re ρ₂₃.
    pub q: f64,
    /// l₁-norm coherence, ≥ 0.
    pub l1: f64,
    /// Two-qubit concurrence, in [0, 1].
    pub concurrence: f64,
    /// Atom A has no mean dipole moment.
    pub nonpolar_a: bool,
    /// Atom B has no mean dipole moment.
    pub nonpolar_b: bool,
}

impl CoherenceReport {
    pub fn evaluate(rho: &TwoAtomState, d: &TransitionDipole, tol: &Tolerances) -> Self {
        Self {
            q: quantum_classicality(rho),
            l1: l1_coherence(rho),
            concurrence: concurrence(rho),
            nonpolar_a: is_nonpolar(rho, d, Atom::A, tol),
            nonpolar_b: is_nonpolar(rho, d, Atom::B, tol),
        }
    }
}
