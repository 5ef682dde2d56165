//! Second-order resonance interaction energy between the two atoms: the
//! steady (time-independent) part, the oscillating part driven by the
//! double-excitation coherence, the finite-window time average, and the
//! two-point atomic correlation function they descend from.
//!
//! The steady energy depends on the joint state only through the
//! single-excitation coherences ρ₂₃, ρ₃₂:
//!
//! ```text
//! E = Σ_ij (ρ₂₃ d^A_i conj(d^B_j) + ρ₃₂ conj(d^A_i) d^B_j) V_ij
//! ```
//!
//! which for identical dipoles d^A = d^B = d collapses to
//! 2·Re(ρ₂₃)·Σ_ij Re(d_i conj(d_j)) V_ij: only the real part of ρ₂₃ (the
//! quantum classicality) matters. The ρ₁₄/ρ₄₁ coherences instead produce
//! a term oscillating at 2ω₀ whose full-period average vanishes.

use crate::tensor::dipole_tensor;
use crate::types::{DomainError, Geometry, Result, Tolerances, TransitionDipole, TwoAtomState};
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

/// Σ_ij dA_i conj(dB_j) m_ij for a real symmetric m.
///
/// Terms are accumulated in (i,j)/(j,i) pairs so that for dA = dB every
/// partial sum is exactly real; the dA = dB contraction then carries no
/// spurious imaginary round-off into the energy.
pub(crate) fn contract(
    da: &Vector3<Complex64>,
    db: &Vector3<Complex64>,
    m: &Matrix3<f64>,
) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        s += da[i] * db[i].conj() * Complex64::new(m[(i, i)], 0.0);
        for j in (i + 1)..3 {
            s += (da[i] * db[j].conj() + da[j] * db[i].conj()) * Complex64::new(m[(i, j)], 0.0);
        }
    }
    s
}

/// Σ_ij dA_i dB_j m_ij (no conjugation), paired the same way.
pub(crate) fn contract_plain(
    da: &Vector3<Complex64>,
    db: &Vector3<Complex64>,
    m: &Matrix3<f64>,
) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        s += da[i] * db[i] * Complex64::new(m[(i, i)], 0.0);
        for j in (i + 1)..3 {
            s += (da[i] * db[j] + da[j] * db[i]) * Complex64::new(m[(i, j)], 0.0);
        }
    }
    s
}

/// Two-point correlation ⟨C^{AB}_ij(τ, τ′)⟩ of the dipole operators of
/// atoms A and B in the given joint state, as four coefficient matrices
/// attached to their phase factors:
///
/// ```text
/// C_ij(τ,τ′) = ρ₂₃ d^A_i conj(d^B_j) e^{−iω₀Δτ}
///            + ρ₃₂ conj(d^A_i) d^B_j e^{+iω₀Δτ}
///            + ρ₁₄ d^A_i d^B_j e^{+iω₀Δτ − 2iω₀τ}
///            + ρ₄₁ conj(d^A_i) conj(d^B_j) e^{−iω₀Δτ + 2iω₀τ},   Δτ = τ−τ′.
/// ```
///
/// The ρ₂₃/ρ₃₂ pieces depend on τ−τ′ only; the ρ₁₄/ρ₄₁ pieces carry the
/// phases e^{∓iω₀(τ+τ′)}, so the correlation is stationary exactly when
/// those coherences vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicCorrelation {
    m23: Matrix3<Complex64>,
    m32: Matrix3<Complex64>,
    m14: Matrix3<Complex64>,
    m41: Matrix3<Complex64>,
    omega0: f64,
}

impl AtomicCorrelation {
    pub fn new(
        rho: &TwoAtomState,
        da: &TransitionDipole,
        db: &TransitionDipole,
        omega0: f64,
    ) -> Self {
        let a = da.components();
        let b = db.components();
        let outer = |f: &dyn Fn(usize, usize) -> Complex64| Matrix3::from_fn(f);
        Self {
            m23: outer(&|i, j| rho.rho23() * a[i] * b[j].conj()),
            m32: outer(&|i, j| rho.rho32() * a[i].conj() * b[j]),
            m14: outer(&|i, j| rho.rho14() * a[i] * b[j]),
            m41: outer(&|i, j| rho.rho41() * a[i].conj() * b[j].conj()),
            omega0,
        }
    }

    /// Correlation for the roles of the atoms exchanged (B first), for
    /// the same physical state and dipoles.
    pub fn swapped_roles(
        rho: &TwoAtomState,
        da: &TransitionDipole,
        db: &TransitionDipole,
        omega0: f64,
    ) -> Self {
        Self::new(&rho.swap_atoms(), db, da, omega0)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// True when the τ+τ′ dependent coefficients vanish within tol_zero,
    /// relative to the largest coefficient.
    pub fn is_stationary(&self, tol: &Tolerances) -> bool {
        let nonstationary = self.m14.norm() + self.m41.norm();
        let scale = self.m23.norm() + self.m32.norm();
        nonstationary <= tol.tol_zero * scale.max(1.0)
    }

    /// C_ij(τ, τ′).
    pub fn evaluate(&self, tau: f64, tau_prime: f64) -> Matrix3<Complex64> {
        let dt = self.omega0 * (tau - tau_prime);
        let st = self.omega0 * (tau + tau_prime);
        let e_minus = Complex64::from_polar(1.0, -dt);
        let e_plus = Complex64::from_polar(1.0, dt);
        let e_down = Complex64::from_polar(1.0, -st);
        let e_up = Complex64::from_polar(1.0, st);
        self.m23 * e_minus + self.m32 * e_plus + self.m14 * e_down + self.m41 * e_up
    }
}

/// One-shot evaluation of the atomic correlation matrix at (τ, τ′).
pub fn atomic_correlation(
    rho: &TwoAtomState,
    da: &TransitionDipole,
    db: &TransitionDipole,
    omega0: f64,
    tau: f64,
    tau_prime: f64,
) -> Matrix3<Complex64> {
    AtomicCorrelation::new(rho, da, db, omega0).evaluate(tau, tau_prime)
}

/// Steady (time-independent) resonance interaction energy
///
/// E = Σ_ij (ρ₂₃ d^A_i conj(d^B_j) + ρ₃₂ conj(d^A_i) d^B_j) V_ij.
///
/// The two terms are algebraic conjugates whenever ρ₃₂ = conj(ρ₂₃), so
/// the result is real for any Hermitian state; a residual imaginary part
/// above tolerance indicates an inconsistent (non-Hermitian) input and is
/// reported as an error rather than silently truncated.
pub fn steady_energy(
    rho: &TwoAtomState,
    da: &TransitionDipole,
    db: &TransitionDipole,
    geom: &Geometry,
) -> Result<f64> {
    let v = dipole_tensor(geom);
    let s = contract(da.components(), db.components(), v.matrix());
    let p1 = rho.rho23() * s;
    let p2 = rho.rho32() * s.conj();
    let raw = p1 + p2;
    let scale = p1.norm() + p2.norm();
    let tol = Tolerances::default();
    if raw.im.abs() > tol.tol_zero * scale {
        return Err(DomainError::ImaginaryResidue {
            residue: raw.im.abs(),
            tol: tol.tol_zero * scale,
        });
    }
    Ok(raw.re)
}

/// Complex amplitude A = ρ₁₄ Σ_ij d^A_i d^B_j V_ij of the oscillating
/// part; the physical oscillating energy is
/// δE(τ) = A e^{−2iω₀τ} + ρ₄₁ Σ conj(d^A_i) conj(d^B_j) V_ij e^{+2iω₀τ},
/// and the second coefficient is conj(A) for Hermitian states, giving
/// δE(τ) = 2·Re[A e^{−2iω₀τ}].
pub fn oscillating_amplitude(
    rho: &TwoAtomState,
    da: &TransitionDipole,
    db: &TransitionDipole,
    geom: &Geometry,
) -> Complex64 {
    let v = dipole_tensor(geom);
    rho.rho14() * contract_plain(da.components(), db.components(), v.matrix())
}

/// Average of the total interaction energy over the window [0, T]:
///
/// steady + 2·Re[A·(e^{−2iω₀T} − 1)/(−2iω₀T)].
///
/// The correction vanishes at full half-periods T = kπ/ω₀ and decays as
/// 1/(ω₀T), so the steady part is the long-time observable.
pub fn time_averaged_energy(
    rho: &TwoAtomState,
    da: &TransitionDipole,
    db: &TransitionDipole,
    geom: &Geometry,
    t: f64,
) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(DomainError::NonPositiveTime(t));
    }
    let steady = steady_energy(rho, da, db, geom)?;
    let a = oscillating_amplitude(rho, da, db, geom);
    let phase = 2.0 * geom.omega0() * t;
    let correction =
        a * (Complex64::from_polar(1.0, -phase) - 1.0) / Complex64::new(0.0, -phase);
    Ok(steady + 2.0 * correction.re)
}

/// Scale-free form Ê = E·4πr³/(|d^A||d^B|) of an energy at the given
/// geometry; the near-zone energy of unit dipoles is O(1) in this form.
pub fn dimensionless_energy(
    energy: f64,
    geom: &Geometry,
    da: &TransitionDipole,
    db: &TransitionDipole,
) -> f64 {
    let r = geom.separation();
    energy * 4.0 * std::f64::consts::PI * r * r * r / (da.norm() * db.norm())
}

/// Both pieces of the interaction energy for one (state, dipoles,
/// geometry) input.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyResult {
    /// Time-independent part, real by Hermiticity.
    pub steady: f64,
    /// Coefficient of e^{−2iω₀τ}; the physical oscillating part is
    /// 2·Re[amplitude·e^{−2iω₀τ}].
    pub oscillating_amplitude: Complex64,
    /// Transition frequency the oscillation runs at.
    pub omega0: f64,
}

impl EnergyResult {
    pub fn evaluate(
        rho: &TwoAtomState,
        da: &TransitionDipole,
        db: &TransitionDipole,
        geom: &Geometry,
    ) -> Result<Self> {
        Ok(Self {
            steady: steady_energy(rho, da, db, geom)?,
            oscillating_amplitude: oscillating_amplitude(rho, da, db, geom),
            omega0: geom.omega0(),
        })
    }

    /// Instantaneous oscillating part 2·Re[A e^{−2iω₀τ}].
    pub fn oscillating_part(&self, tau: f64) -> f64 {
        let phase = Complex64::from_polar(1.0, -2.0 * self.omega0 * tau);
        2.0 * (self.oscillating_amplitude * phase).re
    }

    /// Instantaneous total energy at observation time τ.
    pub fn total(&self, tau: f64) -> f64 {
        self.steady + self.oscillating_part(tau)
    }

    /// Closed-form window average over [0, T].
    pub fn time_averaged(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(DomainError::NonPositiveTime(t));
        }
        let phase = 2.0 * self.omega0 * t;
        let correction = self.oscillating_amplitude
            * (Complex64::from_polar(1.0, -phase) - 1.0)
            / Complex64::new(0.0, -phase);
        Ok(self.steady + 2.0 * correction.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{pure_state, werner_state};
    use approx::assert_relative_eq;
    use nalgebra::Matrix4;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dipole_x() -> TransitionDipole {
        TransitionDipole::from_real(1.0, 0.0, 0.0).unwrap()
    }

    fn complex_dipole() -> TransitionDipole {
        TransitionDipole::new(Vector3::new(c(0.8, 0.3), c(-0.1, 0.4), c(0.5, -0.6))).unwrap()
    }

    /// (|gg⟩ + |ee⟩)/√2 projector: only ρ₁₁, ρ₄₄, ρ₁₄, ρ₄₁ nonzero.
    fn bell_phi() -> TwoAtomState {
        let mut m = Matrix4::zeros();
        let half = c(0.5, 0.0);
        m[(0, 0)] = half;
        m[(3, 3)] = half;
        m[(0, 3)] = half;
        m[(3, 0)] = half;
        TwoAtomState::from_matrix(m)
    }

    fn ground() -> TwoAtomState {
        let mut m = Matrix4::zeros();
        m[(3, 3)] = c(1.0, 0.0);
        TwoAtomState::from_matrix(m)
    }

    /// Q-free state with ρ₂₃ exactly imaginary.
    fn imaginary_coherence_state(y: f64) -> TwoAtomState {
        let mut m = Matrix4::zeros();
        m[(1, 1)] = c(0.5, 0.0);
        m[(2, 2)] = c(0.5, 0.0);
        m[(1, 2)] = c(0.0, y);
        m[(2, 1)] = c(0.0, -y);
        TwoAtomState::from_matrix(m)
    }

    #[test]
    fn correlation_vanishes_for_ground_state() {
        let corr = AtomicCorrelation::new(&ground(), &dipole_x(), &dipole_x(), 1.0);
        for (tau, tau_p) in [(0.0, 0.0), (1.3, 0.4), (-2.0, 5.0)] {
            assert_eq!(corr.evaluate(tau, tau_p), Matrix3::zeros());
        }
    }

    #[test]
    fn correlation_of_symmetric_bell_state_at_equal_times() {
        let d = TransitionDipole::from_real(0.3, -0.2, 0.9).unwrap();
        let m = atomic_correlation(&pure_state(FRAC_PI_4, 0.0), &d, &d, 1.0, 0.7, 0.7);
        for i in 0..3 {
            for j in 0..3 {
                let expected = d.components()[i].re * d.components()[j].re;
                assert_relative_eq!(m[(i, j)].re, expected, epsilon = 1e-15);
                assert!(m[(i, j)].im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn correlation_is_stationary_without_double_excitation_coherence() {
        let corr = AtomicCorrelation::new(&pure_state(0.4, 1.0), &complex_dipole(), &dipole_x(), 2.0);
        assert!(corr.is_stationary(&Tolerances::default()));
        let shift = 0.83;
        let a = corr.evaluate(1.0, 0.25);
        let b = corr.evaluate(1.0 + shift, 0.25 + shift);
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn bell_phi_correlation_depends_on_total_time() {
        let corr = AtomicCorrelation::new(&bell_phi(), &dipole_x(), &dipole_x(), 1.0);
        assert!(!corr.is_stationary(&Tolerances::default()));
        let a = corr.evaluate(0.0, 0.0);
        let b = corr.evaluate(FRAC_PI_2, FRAC_PI_2); // same Δτ, shifted τ+τ′
        assert!((a - b).norm() > 0.5);
    }

    #[test]
    fn correlation_role_swap_is_hermitian_transpose() {
        let rho = pure_state(0.6, -1.1);
        let (da, db) = (complex_dipole(), dipole_x());
        let ab = AtomicCorrelation::new(&rho, &da, &db, 1.7);
        let ba = AtomicCorrelation::swapped_roles(&rho, &da, &db, 1.7);
        for (tau, tau_p) in [(0.0, 0.0), (0.9, -0.4), (2.2, 1.1)] {
            let lhs = ba.evaluate(tau, tau_p);
            let rhs = ab.evaluate(tau_p, tau).adjoint();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn steady_energy_of_pure_family() {
        let geom = Geometry::along_z(1.0, 1.0).unwrap();
        let d = TransitionDipole::from_real(0.4, 0.0, 1.2).unwrap();
        let v = dipole_tensor(&geom);
        let dd_v: f64 = contract(d.components(), d.components(), v.matrix()).re;
        for (theta, phi) in [(0.3, 0.0), (FRAC_PI_4, 1.2), (1.4, -0.8)] {
            let e = steady_energy(&pure_state(theta, phi), &d, &d, &geom).unwrap();
            assert_relative_eq!(
                e,
                (2.0 * theta).sin() * phi.cos() * dd_v,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn steady_energy_of_werner_family() {
        let geom = Geometry::along_z(0.8, 2.0).unwrap();
        let d = dipole_x();
        let v = dipole_tensor(&geom);
        let dd_v: f64 = contract(d.components(), d.components(), v.matrix()).re;
        for p in [0.0, 0.3, 1.0] {
            let e = steady_energy(&werner_state(p).unwrap(), &d, &d, &geom).unwrap();
            assert_relative_eq!(e, p * dd_v, max_relative = 1e-14);
        }
    }

    #[test]
    fn steady_energy_vanishes_for_imaginary_coherence() {
        let geom = Geometry::along_z(1.0, 1.0).unwrap();
        for d in [dipole_x(), complex_dipole()] {
            let e = steady_energy(&imaginary_coherence_state(0.37), &d, &d, &geom).unwrap();
            assert_eq!(e, 0.0);
        }
        // π/2 phase gives Re ρ₂₃ at round-off level, not exact zero
        let e = steady_energy(&pure_state(FRAC_PI_4, FRAC_PI_2), &dipole_x(), &dipole_x(), &geom)
            .unwrap();
        assert!(e.abs() < 1e-15);
    }

    #[test]
    fn steady_energy_matches_classicality_reformulation() {
        let geom = Geometry::new(1.3, Vector3::new(0.6, 0.0, 0.8), 0.9).unwrap();
        let d = complex_dipole();
        let v = dipole_tensor(&geom);
        let re_dd_v: f64 = {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += (d.components()[i] * d.components()[j].conj()).re * v.matrix()[(i, j)];
                }
            }
            s
        };
        for rho in [pure_state(0.5, 0.3), werner_state(0.45).unwrap()] {
            let e = steady_energy(&rho, &d, &d, &geom).unwrap();
            let q = crate::coherence::quantum_classicality(&rho);
            assert_relative_eq!(e, 2.0 * q * re_dd_v, max_relative = 1e-12);
        }
    }

    #[test]
    fn steady_energy_rejects_inconsistent_input() {
        let mut m = Matrix4::zeros();
        m[(1, 1)] = c(0.5, 0.0);
        m[(2, 2)] = c(0.5, 0.0);
        m[(1, 2)] = c(0.3, 0.0);
        m[(2, 1)] = c(0.0, 0.1); // not conj(rho23): breaks Hermiticity
        let rho = TwoAtomState::from_matrix(m);
        let geom = Geometry::along_z(1.0, 1.0).unwrap();
        let d = dipole_x();
        assert!(matches!(
            steady_energy(&rho, &d, &d, &geom),
            Err(DomainError::ImaginaryResidue { .. })
        ));
    }

    #[test]
    fn oscillating_amplitude_of_known_states() {
        let geom = Geometry::along_z(1.0, 1.0).unwrap();
        let d = TransitionDipole::from_real(0.7, 0.0, 0.7).unwrap();
        let v = dipole_tensor(&geom);

        let a = oscillating_amplitude(&bell_phi(), &d, &d, &geom);
        let expected = 0.5 * contract_plain(d.components(), d.components(), v.matrix());
        assert_eq!(a, expected);
        assert_eq!(
            steady_energy(&bell_phi(), &d, &d, &geom).unwrap(),
            0.0
        );

        assert_eq!(
            oscillating_amplitude(&pure_state(0.4, 0.9), &d, &d, &geom),
            c(0.0, 0.0)
        );
        assert_eq!(
            oscillating_amplitude(&werner_state(0.8).unwrap(), &d, &d, &geom),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn time_average_over_half_periods_is_steady() {
        let geom = Geometry::along_z(1.0, 1.3).unwrap();
        let d = dipole_x();
        let rho = bell_phi();
        let a = oscillating_amplitude(&rho, &d, &d, &geom).norm();
        let steady = steady_energy(&rho, &d, &d, &geom).unwrap();
        for k in [1.0, 2.0, 7.0] {
            let t = k * PI / geom.omega0();
            let avg = time_averaged_energy(&rho, &d, &d, &geom, t).unwrap();
            assert!(
                (avg - steady).abs() <= 1e-14 * a.max(1.0),
                "half-period average deviates: {avg} vs {steady}"
            );
        }
    }

    #[test]
    fn time_average_decays_for_pure_oscillation() {
        let geom = Geometry::along_z(1.0, 1.0).unwrap();
        let d = dipole_x();
        let rho = bell_phi();
        let a = oscillating_amplitude(&rho, &d, &d, &geom).norm();
        let t = 1.0e7;
        let avg = time_averaged_energy(&rho, &d, &d, &geom, t).unwrap();
        assert!(avg.abs() <= 2.0 * a / (geom.omega0() * t) + 1e-18);
    }

    #[test]
    fn time_average_of_stationary_state_is_exactly_steady() {
        let geom = Geometry::along_z(2.0, 0.7).unwrap();
        let d = complex_dipole();
        let rho = pure_state(0.9, 0.2);
        let steady = steady_energy(&rho, &d, &d, &geom).unwrap();
        for t in [0.1, 3.0, 1e4] {
            assert_eq!(
                time_averaged_energy(&rho, &d, &d, &geom, t).unwrap(),
                steady
            );
        }
    }

    #[test]
    fn time_average_rejects_nonpositive_window() {
        let geom = Geometry::along_z(1.0, 1.0).unwrap();
        let d = dipole_x();
        for t in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                time_averaged_energy(&pure_state(0.3, 0.0), &d, &d, &geom, t),
                Err(DomainError::NonPositiveTime(_))
            ));
        }
    }

    #[test]
    fn energy_result_time_average_matches_free_function() {
        let geom = Geometry::along_z(1.0, 1.0).unwrap();
        let d = dipole_x();
        let rho = bell_phi();
        let result = EnergyResult::evaluate(&rho, &d, &d, &geom).unwrap();
        for t in [0.4, 2.0, 17.0] {
            assert_eq!(
                result.time_averaged(t).unwrap(),
                time_averaged_energy(&rho, &d, &d, &geom, t).unwrap()
            );
        }
        // instantaneous total oscillates around the (zero) steady part
        let tau_max = 0.0;
        let tau_min = PI / (2.0 * geom.omega0());
        assert!(result.total(tau_max) * result.total(tau_min) < 0.0);
    }

    #[test]
    fn dimensionless_form_strips_scales() {
        let d = TransitionDipole::from_real(0.0, 0.0, 3.0).unwrap();
        // near zone: Ê → 2Q·(d̂_i d̂_j)(δ_ij − 3n_in_j) = −4Q for d ∥ n = ẑ
        let geom = Geometry::along_z(1.0, 1e-6).unwrap();
        let rho = pure_state(FRAC_PI_4, 0.0); // Q = 1/2
        let e = steady_energy(&rho, &d, &d, &geom).unwrap();
        let e_hat = dimensionless_energy(e, &geom, &d, &d);
        assert_relative_eq!(e_hat, -2.0, max_relative = 1e-9);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_complex() -> impl Strategy<Value = Complex64> {
            (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
        }

        fn arb_state() -> impl Strategy<Value = TwoAtomState> {
            proptest::collection::vec(arb_complex(), 16).prop_filter_map(
                "Gram matrix must have nonzero trace",
                |v| {
                    let g = Matrix4::from_iterator(v);
                    let gram = g * g.adjoint();
                    let tr = gram.trace().re;
                    (tr > 1e-6).then(|| TwoAtomState::from_matrix(gram / c(tr, 0.0)))
                },
            )
        }

        fn arb_dipole() -> impl Strategy<Value = TransitionDipole> {
            proptest::collection::vec(arb_complex(), 3).prop_filter_map(
                "dipole must be nonzero",
                |v| TransitionDipole::new(Vector3::new(v[0], v[1], v[2])).ok(),
            )
        }

        fn arb_geom() -> impl Strategy<Value = Geometry> {
            (0.2f64..5.0, -1.0f64..1.0, 0.0f64..PI, 0.2f64..5.0).prop_map(
                |(r, z, azimuth, omega0)| {
                    let s = (1.0 - z * z).sqrt();
                    let n = Vector3::new(s * azimuth.cos(), s * azimuth.sin(), z);
                    Geometry::new(r, n / n.norm(), omega0).unwrap()
                },
            )
        }

        proptest! {
            #[test]
            fn exchange_symmetry(
                rho in arb_state(),
                da in arb_dipole(),
                db in arb_dipole(),
                geom in arb_geom(),
            ) {
                let e = steady_energy(&rho, &da, &db, &geom).unwrap();
                let swapped = steady_energy(
                    &rho.swap_atoms(),
                    &db,
                    &da,
                    &geom.reversed(),
                ).unwrap();
                prop_assert_eq!(e, swapped);
            }

            #[test]
            fn linearity_in_the_state(
                rho1 in arb_state(),
                rho2 in arb_state(),
                alpha in 0.0f64..1.0,
                geom in arb_geom(),
            ) {
                let d = TransitionDipole::from_real(0.3, -0.5, 1.0).unwrap();
                let mixed = TwoAtomState::from_matrix(
                    rho1.matrix() * c(alpha, 0.0) + rho2.matrix() * c(1.0 - alpha, 0.0),
                );
                let e_mixed = steady_energy(&mixed, &d, &d, &geom).unwrap();
                let e1 = steady_energy(&rho1, &d, &d, &geom).unwrap();
                let e2 = steady_energy(&rho2, &d, &d, &geom).unwrap();
                let expected = alpha * e1 + (1.0 - alpha) * e2;
                let scale = e1.abs().max(e2.abs()).max(1e-300);
                prop_assert!((e_mixed - expected).abs() <= 1e-12 * scale.max(e_mixed.abs()));
            }

            #[test]
            fn reformulation_identity(
                rho in arb_state(),
                d in arb_dipole(),
                geom in arb_geom(),
            ) {
                let e = steady_energy(&rho, &d, &d, &geom).unwrap();
                let v = dipole_tensor(&geom);
                let mut re_dd_v = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        re_dd_v += (d.components()[i] * d.components()[j].conj()).re
                            * v.matrix()[(i, j)];
                    }
                }
                let reformulated =
                    2.0 * crate::coherence::quantum_classicality(&rho) * re_dd_v;
                let scale = e.abs().max(reformulated.abs()).max(1e-300);
                prop_assert!((e - reformulated).abs() <= 1e-12 * scale);
            }

            #[test]
            fn zero_classicality_means_zero_energy(
                rho in arb_state(),
                d in arb_dipole(),
                geom in arb_geom(),
            ) {
                // force ρ₂₃ exactly imaginary, keeping Hermiticity
                let mut m = *rho.matrix();
                let y = m[(1, 2)].im;
                m[(1, 2)] = c(0.0, y);
                m[(2, 1)] = c(0.0, -y);
                let zero_q = TwoAtomState::from_matrix(m);
                prop_assert_eq!(
                    steady_energy(&zero_q, &d, &d, &geom).unwrap(),
                    0.0
                );
            }

            #[test]
            fn energy_ignores_irrelevant_entries(
                rho in arb_state(),
                da in arb_dipole(),
                db in arb_dipole(),
                geom in arb_geom(),
                re in -1.0f64..1.0,
                im in -1.0f64..1.0,
            ) {
                let baseline = steady_energy(&rho, &da, &db, &geom).unwrap();
                let mut m = *rho.matrix();
                // perturb every entry outside {23, 32, 14, 41} block
                for (i, j) in [(0usize, 0usize), (1, 1), (2, 2), (3, 3)] {
                    m[(i, j)] += c(re, 0.0);
                }
                for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
                    m[(i, j)] += c(re, im);
                    m[(j, i)] += c(re, -im);
                }
                let perturbed = steady_energy(
                    &TwoAtomState::from_matrix(m), &da, &db, &geom
                ).unwrap();
                prop_assert_eq!(baseline, perturbed);
            }

            #[test]
            fn oscillation_averages_out(
                geom in arb_geom(),
                k in 1u32..200,
            ) {
                let d = TransitionDipole::from_real(1.0, 0.0, 0.0).unwrap();
                let rho = super::bell_phi();
                let a = oscillating_amplitude(&rho, &d, &d, &geom).norm();
                let t = f64::from(k) * PI / geom.omega0();
                let avg = time_averaged_energy(&rho, &d, &d, &geom, t).unwrap();
                prop_assert!(avg.abs() <= 1e-13 * a.max(1.0));
            }
        }
    }
}
