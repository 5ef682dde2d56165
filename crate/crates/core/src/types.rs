//! Domain types shared by every other module: two-atom density matrices,
//! transition dipoles, geometry, and the numeric tolerances used to
//! validate them.
//!
//! The two-atom Hilbert space is spanned by the fixed, globally ordered
//! basis
//!
//! ```text
//! index 1: |ee⟩    index 2: |eg⟩    index 3: |ge⟩    index 4: |gg⟩
//! ```
//!
//! where the first letter is the state of atom A and the second that of
//! atom B (so `|eg⟩` means atom A excited). Every matrix in this crate —
//! density matrices, the spin-flip used for concurrence, partial traces —
//! uses this ordering. In particular `ρ₂₃ = ⟨eg|ρ|ge⟩` is the coherence
//! between the two single-excitation states, the quantity the steady
//! interaction energy pivots on.
//!
//! Natural units (ħ = c = ε₀ = 1) are used throughout.

use nalgebra::{Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by constructors and operations with restricted domains.
#[derive(Debug, Error)]
pub enum DomainError {
    #[error("separation must be positive (got {0})")]
    NonPositiveSeparation(f64),

    #[error("direction vector must have unit norm (got |n| = {0})")]
    NonUnitDirection(f64),

    #[error("transition frequency must be positive (got {0})")]
    NonPositiveFrequency(f64),

    #[error("transition dipole must be finite and nonzero")]
    InvalidDipole,

    #[error("Werner parameter must lie in [0, 1] (got {0})")]
    WernerParameterOutOfRange(f64),

    #[error("averaging time must be positive (got {0})")]
    NonPositiveTime(f64),

    #[error("regulator must be positive (got {0})")]
    NonPositiveRegulator(f64),

    #[error("tolerances must all be strictly positive")]
    NonPositiveTolerance,

    #[error("steady energy has imaginary residue {residue:e} above tolerance {tol:e}")]
    ImaginaryResidue { residue: f64, tol: f64 },

    #[error("oracle requires a stationary state: |rho14| + |rho41| = {0:e} exceeds tolerance")]
    NonStationaryState(f64),

    #[error("oracle did not reach the requested tolerance ({evals} evaluations used); partial value {partial:e} ± {error:e}")]
    OracleNonConvergence {
        evals: usize,
        partial: f64,
        error: f64,
    },

    #[error("oracle eta sequence must be strictly positive and strictly decreasing")]
    BadEtaSequence,

    #[error("oracle relative tolerance must be positive (got {0})")]
    BadRelTol(f64),
}

pub type Result<T> = std::result::Result<T, DomainError>;

/// Numeric tolerances for state and geometry validation.
///
/// Each tolerance is relative to the natural scale of its check
/// (matrix norm for Hermiticity, unity for the trace, and so on).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub tol_herm: f64,
    pub tol_trace: f64,
    pub tol_psd: f64,
    pub tol_geom: f64,
    pub tol_zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_herm: 1e-12,
            tol_trace: 1e-12,
            tol_psd: 1e-10,
            tol_geom: 1e-12,
            tol_zero: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.tol_herm,
            self.tol_trace,
            self.tol_psd,
            self.tol_geom,
            self.tol_zero,
        ];
        if all.iter().all(|t| *t > 0.0) {
            Ok(())
        } else {
            Err(DomainError::NonPositiveTolerance)
        }
    }
}

/// A joint state of the two-atom system: a 4×4 complex matrix in the fixed
/// basis {|ee⟩, |eg⟩, |ge⟩, |gg⟩}.
///
/// Construction does not validate; call [`validate_state`] to check the
/// density-matrix invariants (Hermitian, unit trace, positive semidefinite).
/// Keeping validation separate lets the energy formulas accept slightly
/// degenerate experimental matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAtomState {
    elements: Matrix4<Complex64>,
}

impl TwoAtomState {
    pub fn from_matrix(elements: Matrix4<Complex64>) -> Self {
        Self { elements }
    }

    /// Maximally mixed state I/4.
    pub fn maximally_mixed() -> Self {
        Self::from_matrix(Matrix4::identity() * Complex64::new(0.25, 0.0))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.elements
    }

    /// Element ρ_ij with the paper's 1-based indexing over the fixed basis.
    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        assert!(
            (1..=4).contains(&i) && (1..=4).contains(&j),
            "density matrix indices are 1..=4"
        );
        self.elements[(i - 1, j - 1)]
    }

    /// ρ₂₃ = ⟨eg|ρ|ge⟩, the single-excitation coherence.
    pub fn rho23(&self) -> Complex64 {
        self.elements[(1, 2)]
    }

    /// ρ₃₂ = ⟨ge|ρ|eg⟩.
    pub fn rho32(&self) -> Complex64 {
        self.elements[(2, 1)]
    }

    /// ρ₁₄ = ⟨ee|ρ|gg⟩, the double-excitation coherence.
    pub fn rho14(&self) -> Complex64 {
        self.elements[(0, 3)]
    }

    /// ρ₄₁ = ⟨gg|ρ|ee⟩.
    pub fn rho41(&self) -> Complex64 {
        self.elements[(3, 0)]
    }

    /// Exchange the two atoms: basis rows/columns 2 ↔ 3 (and implicitly
    /// |ee⟩, |gg⟩ fixed). Maps ρ₂₃ ↔ ρ₃₂ while leaving ρ₁₄ in place.
    pub fn swap_atoms(&self) -> Self {
        let m = &self.elements;
        let mut out = *m;
        out.swap_rows(1, 2);
        out.swap_columns(1, 2);
        Self::from_matrix(out)
    }

    /// Eigenvalues of the Hermitian part, ascending. Used by the PSD check.
    pub fn hermitian_eigenvalues(&self) -> Vector4<f64> {
        let m = &self.elements;
        let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev = herm.symmetric_eigen().eigenvalues;
        ev.as_mut_slice()
            .sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        ev
    }
}

/// One violated density-matrix invariant, as reported by [`validate_state`].
#[derive(Debug, Clone, PartialEq)]
pub enum StateViolation {
    /// max_ij |ρ_ij − conj(ρ_ji)| exceeded tol_herm.
    NotHermitian { max_deviation: f64 },
    /// |Tr ρ − 1| exceeded tol_trace.
    TraceNotOne { trace: Complex64 },
    /// Smallest eigenvalue of the Hermitian part fell below −tol_psd.
    NotPositiveSemidefinite { min_eigenvalue: f64 },
}

impl std::fmt::Display for StateViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateViolation::NotHermitian { max_deviation } => {
                write!(f, "not Hermitian (max deviation {max_deviation:e})")
            }
            StateViolation::TraceNotOne { trace } => {
                write!(f, "trace is not 1 (got {} + {}i)", trace.re, trace.im)
            }
            StateViolation::NotPositiveSemidefinite { min_eigenvalue } => {
                write!(
                    f,
                    "not positive semidefinite (min eigenvalue {min_eigenvalue:e})"
                )
            }
        }
    }
}

/// Check the three density-matrix invariants and report every violation.
///
/// The report is empty iff ρ is Hermitian, unit-trace and positive
/// semidefinite within `tol`. Hermiticity and positivity are checked
/// independently, so `validate_state(ρ)` and `validate_state(ρ†)` agree.
pub fn validate_state(rho: &TwoAtomState, tol: &Tolerances) -> Vec<StateViolation> {
    let mut report = Vec::new();
    let m = rho.matrix();

    let mut herm_dev = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            herm_dev = herm_dev.max(dev);
        }
    }
    if herm_dev > tol.tol_herm {
        report.push(StateViolation::NotHermitian {
            max_deviation: herm_dev,
        });
    }

    let trace = m.trace();
    if (trace - Complex64::new(1.0, 0.0)).norm() > tol.tol_trace {
        report.push(StateViolation::TraceNotOne { trace });
    }

    let min_ev = rho.hermitian_eigenvalues()[0];
    if min_ev < -tol.tol_psd {
        report.push(StateViolation::NotPositiveSemidefinite {
            min_eigenvalue: min_ev,
        });
    }

    report
}

/// Projector onto the single-excitation superposition
/// |ψ⟩ = sinθ |ge⟩ + cosθ e^{iφ} |eg⟩.
///
/// Nonzero entries: ρ₂₂ = cos²θ, ρ₃₃ = sin²θ, ρ₂₃ = sinθ cosθ e^{iφ},
/// ρ₃₂ = conj(ρ₂₃).
pub fn pure_state(theta: f64, phi: f64) -> TwoAtomState {
    let amp_eg = Complex64::from_polar(theta.cos(), phi);
    let amp_ge = Complex64::new(theta.sin(), 0.0);
    let mut psi = [Complex64::new(0.0, 0.0); 4];
    psi[1] = amp_eg;
    psi[2] = amp_ge;

    let mut m = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = psi[i] * psi[j].conj();
        }
    }
    TwoAtomState::from_matrix(m)
}

/// Werner state (1−p)/4 · I + p |Ψ₊⟩⟨Ψ₊| with |Ψ₊⟩ = (|ge⟩ + |eg⟩)/√2.
///
/// Entries: ρ₁₁ = ρ₄₄ = (1−p)/4, ρ₂₂ = ρ₃₃ = (1+p)/4, ρ₂₃ = ρ₃₂ = p/2.
/// The state is positive semidefinite exactly for p ∈ [0, 1]; values
/// outside that range are rejected.
pub fn werner_state(p: f64) -> Result<TwoAtomState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(DomainError::WernerParameterOutOfRange(p));
    }
    let r = |x: f64| Complex64::new(x, 0.0);
    let mut m = Matrix4::zeros();
    m[(0, 0)] = r((1.0 - p) / 4.0);
    m[(3, 3)] = r((1.0 - p) / 4.0);
    m[(1, 1)] = r((1.0 + p) / 4.0);
    m[(2, 2)] = r((1.0 + p) / 4.0);
    m[(1, 2)] = r(p / 2.0);
    m[(2, 1)] = r(p / 2.0);
    Ok(TwoAtomState::from_matrix(m))
}

/// Transition dipole matrix element d_i = ⟨g|D_i|e⟩ of one atom, a complex
/// 3-vector in natural units.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDipole {
    d: Vector3<Complex64>,
}

impl TransitionDipole {
    pub fn new(d: Vector3<Complex64>) -> Result<Self> {
        let norm_sq: f64 = d.iter().map(|c| c.norm_sqr()).sum();
        if !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(DomainError::InvalidDipole);
        }
        Ok(Self { d })
    }

    /// Real dipole from Cartesian components.
    pub fn from_real(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vector3::new(
            Complex64::new(x, 0.0),
            Complex64::new(y, 0.0),
            Complex64::new(z, 0.0),
        ))
    }

    pub fn components(&self) -> &Vector3<Complex64> {
        &self.d
    }

    /// |d|² = Σ_i |d_i|².
    pub fn norm_sq(&self) -> f64 {
        self.d.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }
}

/// Interatomic geometry: separation r > 0 along the unit direction n
/// (from atom A to atom B), and the shared transition frequency ω₀ > 0.
///
/// The direction is a free unit vector; the configuration with the atoms
/// on the z-axis is `Geometry::along_z(r, omega0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    r: f64,
    n: Vector3<f64>,
    omega0: f64,
}

impl Geometry {
    pub fn new(r: f64, n: Vector3<f64>, omega0: f64) -> Result<Self> {
        Self::with_tolerances(r, n, omega0, &Tolerances::default())
    }

    pub fn with_tolerances(r: f64, n: Vector3<f64>, omega0: f64, tol: &Tolerances) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(DomainError::NonPositiveSeparation(r));
        }
        let norm = n.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > tol.tol_geom {
            return Err(DomainError::NonUnitDirection(norm));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(DomainError::NonPositiveFrequency(omega0));
        }
        Ok(Self { r, n, omega0 })
    }

    /// Atoms a distance r apart along the z-axis.
    pub fn along_z(r: f64, omega0: f64) -> Result<Self> {
        Self::new(r, Vector3::new(0.0, 0.0, 1.0), omega0)
    }

    pub fn separation(&self) -> f64 {
        self.r
    }

    pub fn direction(&self) -> &Vector3<f64> {
        &self.n
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Dimensionless retardation parameter ω₀r.
    pub fn omega0_r(&self) -> f64 {
        self.omega0 * self.r
    }

    /// Same separation and frequency, reversed direction.
    pub fn reversed(&self) -> Self {
        Self {
            r: self.r,
            n: -self.n,
            omega0: self.omega0,
        }
    }
}
