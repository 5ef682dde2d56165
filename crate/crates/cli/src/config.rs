//! Configuration document: strict TOML schema, resolved into validated
//! domain objects before any mode runs. Every rejection names the violated
//! invariant and exits with the configuration error code.

use nalgebra::{Matrix4, Vector3};
use num_complex::Complex64;
use serde::Deserialize;
use std::path::PathBuf;

use resint_core::{
    validate_state, werner_state, CutoffStrategy, DomainError, OracleConfig, Tolerances,
    TransitionDipole, TwoAtomState,
};

/// Process-level error: a message plus the exit code contract
/// (1 = I/O, 2 = invalid configuration or input, 3 = oracle non-convergence).
#[derive(Debug)]
pub struct AppError {
    pub message: String,
    pub code: u8,
}

impl AppError {
    pub fn config(message: impl Into<String>) -> Self {
        AppError {
            message: message.into(),
            code: 2,
        }
    }

    pub fn oracle(message: impl Into<String>) -> Self {
        AppError {
            message: message.into(),
            code: 3,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        AppError {
            message: message.into(),
            code: 1,
        }
    }

    pub fn from_domain(e: DomainError) -> Self {
        match e {
            DomainError::OracleNonConvergence { .. } => AppError::oracle(e.to_string()),
            other => AppError::config(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Energy,
    Tensor,
    Coherence,
    Sweep,
    Scan,
    OracleCheck,
    SlopeFit,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Energy => "energy",
            Mode::Tensor => "tensor",
            Mode::Coherence => "coherence",
            Mode::Sweep => "sweep",
            Mode::Scan => "scan",
            Mode::OracleCheck => "oracle-check",
            Mode::SlopeFit => "slope-fit",
        }
    }

    fn from_name(name: &str) -> Option<Mode> {
        match name {
            "energy" => Some(Mode::Energy),
            "tensor" => Some(Mode::Tensor),
            "coherence" => Some(Mode::Coherence),
            "sweep" => Some(Mode::Sweep),
            "scan" => Some(Mode::Scan),
            "oracle-check" => Some(Mode::OracleCheck),
            "slope-fit" => Some(Mode::SlopeFit),
            _ => None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<String>,
    omega0: f64,
    n: [f64; 3],
    dipole_a: [[f64; 2]; 3],
    dipole_b: Option<[[f64; 2]; 3]>,
    r: Option<f64>,
    r_range: Option<RangeSpec>,
    state: Option<StateSpec>,
    scan: Option<ScanSpec>,
    oracle: Option<OracleOverrides>,
    tolerances: Option<ToleranceSpec>,
    output_path: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeSpec {
    min: f64,
    max: f64,
    count: usize,
    spacing: Spacing,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Spacing {
    Linear,
    Log,
    /// Separations snapped to the extrema of cos(ω₀r), r_k = kπ/ω₀; this
    /// is how far-zone envelopes are sampled without hitting the
    /// oscillatory zeros.
    Extrema,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateSpec {
    pure: Option<PureSpec>,
    werner: Option<WernerSpec>,
    raw: Option<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PureSpec {
    theta: f64,
    phi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WernerSpec {
    p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanSpec {
    theta: Option<AxisSpec>,
    phi: Option<AxisSpec>,
    p: Option<AxisSpec>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct AxisSpec {
    min: f64,
    max: f64,
    count: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleOverrides {
    eta_sequence: Option<Vec<f64>>,
    rel_tol: Option<f64>,
    max_evals: Option<usize>,
    min_tail_half_waves: Option<usize>,
    max_tail_half_waves: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ToleranceSpec {
    tol_herm: Option<f64>,
    tol_trace: Option<f64>,
    tol_psd: Option<f64>,
    tol_geom: Option<f64>,
    tol_zero: Option<f64>,
}

/// Scan targets one state family at fixed geometry.
pub enum ResolvedScan {
    PureGrid { thetas: Vec<f64>, phis: Vec<f64> },
    WernerLine { ps: Vec<f64> },
}

/// Fully validated configuration, ready for any mode runner.
pub struct ResolvedConfig {
    pub mode: Option<Mode>,
    pub omega0: f64,
    pub n: Vector3<f64>,
    pub dipole_a: TransitionDipole,
    pub dipole_b: TransitionDipole,
    pub r: Option<f64>,
    pub r_values: Option<Vec<f64>>,
    pub state: Option<TwoAtomState>,
    pub scan: Option<ResolvedScan>,
    pub oracle: OracleConfig,
    pub tolerances: Tolerances,
    pub output_path: Option<PathBuf>,
}

fn complex_triplet(pairs: &[[f64; 2]; 3]) -> Vector3<Complex64> {
    Vector3::new(
        Complex64::new(pairs[0][0], pairs[0][1]),
        Complex64::new(pairs[1][0], pairs[1][1]),
        Complex64::new(pairs[2][0], pairs[2][1]),
    )
}

fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    (0..count)
        .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
        .collect()
}

fn resolve_state(spec: &StateSpec, tol: &Tolerances) -> Result<TwoAtomState, AppError> {
    let picked = usize::from(spec.pure.is_some())
        + usize::from(spec.werner.is_some())
        + usize::from(spec.raw.is_some());
    if picked != 1 {
        return Err(AppError::config(
            "state must specify exactly one of pure, werner, raw",
        ));
    }
    let rho = if let Some(p) = &spec.pure {
        if !(p.theta.is_finite() && p.phi.is_finite()) {
            return Err(AppError::config("state.pure angles must be finite"));
        }
        resint_core::pure_state(p.theta, p.phi)
    } else if let Some(w) = &spec.werner {
        werner_state(w.p).map_err(AppError::from_domain)?
    } else {
        let raw = spec.raw.as_ref().expect("raw variant");
        if raw.len() != 16 {
            return Err(AppError::config(format!(
                "state.raw must hold 16 [re, im] entries in row-major order (got {})",
                raw.len()
            )));
        }
        let m = Matrix4::from_fn(|i, j| {
            let pair = raw[4 * i + j];
            Complex64::new(pair[0], pair[1])
        });
        TwoAtomState::from_matrix(m)
    };
    let violations = validate_state(&rho, tol);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(AppError::config(format!(
            "state is not a valid density matrix: {}",
            list.join("; ")
        )));
    }
    Ok(rho)
}

fn resolve_range(spec: &RangeSpec, omega0: f64) -> Result<Vec<f64>, AppError> {
    if !(spec.min.is_finite() && spec.min > 0.0) {
        return Err(AppError::config(format!(
            "r_range.min must be positive (got {})",
            spec.min
        )));
    }
    if !(spec.max.is_finite() && spec.max > spec.min) {
        return Err(AppError::config(format!(
            "r_range.max must exceed r_range.min (got {})",
            spec.max
        )));
    }
    if spec.count < 2 {
        return Err(AppError::config("r_range.count must be at least 2"));
    }
    let values = match spec.spacing {
        Spacing::Linear => linspace(spec.min, spec.max, spec.count),
        Spacing::Log => linspace(spec.min.ln(), spec.max.ln(), spec.count)
            .into_iter()
            .map(f64::exp)
            .collect(),
        Spacing::Extrema => {
            let k_min = (spec.min * omega0 / std::f64::consts::PI).round().max(1.0);
            let k_max = (spec.max * omega0 / std::f64::consts::PI).round();
            if k_max < k_min + 1.0 {
                return Err(AppError::config(
                    "r_range with extrema spacing must span at least two extrema kπ/ω₀",
                ));
            }
            let mut ks: Vec<u64> = linspace(k_min.ln(), k_max.ln(), spec.count)
                .into_iter()
                .map(|x| x.exp().round() as u64)
                .collect();
            ks.dedup();
            ks.into_iter()
                .map(|k| k as f64 * std::f64::consts::PI / omega0)
                .collect()
        }
    };
    Ok(values)
}

fn resolve_axis(axis: &AxisSpec, label: &str) -> Result<Vec<f64>, AppError> {
    if !(axis.min.is_finite() && axis.max.is_finite() && axis.max >= axis.min) {
        return Err(AppError::config(format!(
            "scan.{label} must have finite min ≤ max"
        )));
    }
    if axis.count == 0 {
        return Err(AppError::config(format!(
            "scan.{label}.count must be at least 1"
        )));
    }
    Ok(linspace(axis.min, axis.max, axis.count))
}

fn resolve_scan(spec: &ScanSpec) -> Result<ResolvedScan, AppError> {
    match (&spec.theta, &spec.phi, &spec.p) {
        (Some(t), Some(f), None) => Ok(ResolvedScan::PureGrid {
            thetas: resolve_axis(t, "theta")?,
            phis: resolve_axis(f, "phi")?,
        }),
        (None, None, Some(p)) => Ok(ResolvedScan::WernerLine {
            ps: resolve_axis(p, "p")?,
        }),
        _ => Err(AppError::config(
            "scan must specify either theta and phi (pure family) or p (Werner family)",
        )),
    }
}

fn resolve_tolerances(spec: Option<&ToleranceSpec>) -> Result<Tolerances, AppError> {
    let mut tol = Tolerances::default();
    if let Some(s) = spec {
        if let Some(v) = s.tol_herm {
            tol.tol_herm = v;
        }
        if let Some(v) = s.tol_trace {
            tol.tol_trace = v;
        }
        if let Some(v) = s.tol_psd {
            tol.tol_psd = v;
        }
        if let Some(v) = s.tol_geom {
            tol.tol_geom = v;
        }
        if let Some(v) = s.tol_zero {
            tol.tol_zero = v;
        }
    }
    tol.validate().map_err(AppError::from_domain)?;
    Ok(tol)
}

fn resolve_oracle(spec: Option<&OracleOverrides>, omega0: f64) -> Result<OracleConfig, AppError> {
    let mut config = OracleConfig::default_for(omega0);
    if let Some(s) = spec {
        if let Some(etas) = &s.eta_sequence {
            config.eta_sequence = etas.clone();
        }
        if let Some(v) = s.rel_tol {
            config.rel_tol = v;
        }
        if let Some(v) = s.max_evals {
            config.max_evals = v;
        }
        let CutoffStrategy::PanelsWithTailAcceleration {
            mut min_tail_half_waves,
            mut max_tail_half_waves,
        } = config.omega_cutoff_strategy;
        if let Some(v) = s.min_tail_half_waves {
            min_tail_half_waves = v;
        }
        if let Some(v) = s.max_tail_half_waves {
            max_tail_half_waves = v;
        }
        config.omega_cutoff_strategy = CutoffStrategy::PanelsWithTailAcceleration {
            min_tail_half_waves,
            max_tail_half_waves,
        };
    }
    config.validate().map_err(AppError::from_domain)?;
    Ok(config)
}

pub fn parse_config(text: &str) -> Result<ResolvedConfig, AppError> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| AppError::config(format!("invalid configuration: {e}")))?;

    let mode = match &raw.mode {
        None => None,
        Some(name) => Some(Mode::from_name(name).ok_or_else(|| {
            AppError::config(format!(
                "unknown mode {name:?}; expected one of energy, tensor, coherence, sweep, scan, oracle-check, slope-fit"
            ))
        })?),
    };

    if !(raw.omega0.is_finite() && raw.omega0 > 0.0) {
        return Err(AppError::from_domain(DomainError::NonPositiveFrequency(
            raw.omega0,
        )));
    }
    let n = Vector3::new(raw.n[0], raw.n[1], raw.n[2]);
    let tolerances = resolve_tolerances(raw.tolerances.as_ref())?;
    // geometry construction revalidates; checking here names the invariant
    // before any separation is known
    let n_norm = n.norm();
    if !n_norm.is_finite() || (n_norm - 1.0).abs() > tolerances.tol_geom {
        return Err(AppError::from_domain(DomainError::NonUnitDirection(n_norm)));
    }

    let dipole_a =
        TransitionDipole::new(complex_triplet(&raw.dipole_a)).map_err(AppError::from_domain)?;
    let dipole_b = match &raw.dipole_b {
        Some(pairs) => TransitionDipole::new(complex_triplet(pairs)).map_err(AppError::from_domain)?,
        None => dipole_a.clone(),
    };

    let (r, r_values) = match (&raw.r, &raw.r_range) {
        (Some(r), None) => {
            if !(r.is_finite() && *r > 0.0) {
                return Err(AppError::from_domain(DomainError::NonPositiveSeparation(*r)));
            }
            (Some(*r), None)
        }
        (None, Some(range)) => (None, Some(resolve_range(range, raw.omega0)?)),
        _ => {
            return Err(AppError::config(
                "configuration must set exactly one of r, r_range",
            ))
        }
    };

    let state = match &raw.state {
        Some(spec) => Some(resolve_state(spec, &tolerances)?),
        None => None,
    };
    let scan = match &raw.scan {
        Some(spec) => Some(resolve_scan(spec)?),
        None => None,
    };
    let oracle = resolve_oracle(raw.oracle.as_ref(), raw.omega0)?;

    Ok(ResolvedConfig {
        mode,
        omega0: raw.omega0,
        n,
        dipole_a,
        dipole_b,
        r,
        r_values,
        state,
        scan,
        oracle,
        tolerances,
        output_path: raw.output_path.map(PathBuf::from),
    })
}
