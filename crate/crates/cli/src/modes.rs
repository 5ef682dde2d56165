//! Mode runners: each consumes the resolved configuration, prints a
//! `key = value` summary on standard output, and writes CSV either to the
//! configured output path or (absent a path) after the summary.
//!
//! Output contract: floats are printed with 17 significant digits
//! (`{:.16e}`), rows follow the input order whatever the worker count, so
//! a fixed configuration produces bit-identical output.

use rayon::prelude::*;
use std::path::PathBuf;

use resint_core::{
    concurrence, dimensionless_energy, dipole_tensor, is_nonpolar, l1_coherence,
    oracle_steady_energy, pure_state, quantum_classicality, steady_energy, werner_state, Atom,
    EnergyResult, Geometry, TwoAtomState,
};

use crate::config::{AppError, Mode, ResolvedConfig, ResolvedScan};

/// Command-line toggles that modulate a mode without changing the config.
pub struct Flags {
    pub dimensionless: bool,
    pub coherence: bool,
}

fn fe(x: f64) -> String {
    format!("{x:.16e}")
}

struct Output {
    summary: Vec<String>,
    csv: Option<(String, Vec<String>)>,
}

impl Output {
    fn new(mode: Mode) -> Self {
        Output {
            summary: vec![format!("mode = {}", mode.name())],
            csv: None,
        }
    }

    fn line(&mut self, key: &str, value: impl AsRef<str>) {
        self.summary.push(format!("{key} = {}", value.as_ref()));
    }

    fn table(&mut self, header: &str, rows: Vec<String>) {
        self.csv = Some((header.to_string(), rows));
    }

    fn emit(self, path: Option<&PathBuf>) -> Result<(), AppError> {
        for line in &self.summary {
            println!("{line}");
        }
        if let Some((header, rows)) = self.csv {
            let mut text = String::with_capacity(64 * (rows.len() + 1));
            text.push_str(&header);
            text.push('\n');
            for row in &rows {
                text.push_str(row);
                text.push('\n');
            }
            match path {
                Some(p) => {
                    std::fs::write(p, text).map_err(|e| {
                        AppError::io(format!("cannot write {}: {e}", p.display()))
                    })?;
                    println!("output = {}", p.display());
                }
                None => {
                    println!();
                    print!("{text}");
                }
            }
        }
        Ok(())
    }
}

fn geometry_at(cfg: &ResolvedConfig, r: f64) -> Result<Geometry, AppError> {
    Geometry::with_tolerances(r, cfg.n, cfg.omega0, &cfg.tolerances).map_err(AppError::from_domain)
}

fn require_state(cfg: &ResolvedConfig, mode: Mode) -> Result<&TwoAtomState, AppError> {
    cfg.state.as_ref().ok_or_else(|| {
        AppError::config(format!("mode {} requires a [state] section", mode.name()))
    })
}

fn require_single_r(cfg: &ResolvedConfig, mode: Mode) -> Result<f64, AppError> {
    cfg.r.ok_or_else(|| {
        AppError::config(format!(
            "mode {} requires the single separation r, not r_range",
            mode.name()
        ))
    })
}

fn require_r_values(cfg: &ResolvedConfig, mode: Mode) -> Result<&[f64], AppError> {
    cfg.r_values.as_deref().ok_or_else(|| {
        AppError::config(format!(
            "mode {} requires the [r_range] section, not a single r",
            mode.name()
        ))
    })
}

pub fn run(mode: Mode, cfg: &ResolvedConfig, flags: &Flags) -> Result<(), AppError> {
    match mode {
        Mode::Energy => run_energy(cfg, flags),
        Mode::Tensor => run_tensor(cfg),
        Mode::Coherence => run_coherence(cfg),
        Mode::Sweep => run_sweep(cfg, flags, Mode::Sweep),
        Mode::Scan => run_scan(cfg, flags),
        Mode::OracleCheck => run_oracle_check(cfg, flags),
        Mode::SlopeFit => run_sweep(cfg, flags, Mode::SlopeFit),
    }
}

fn run_energy(cfg: &ResolvedConfig, flags: &Flags) -> Result<(), AppError> {
    let rho = require_state(cfg, Mode::Energy)?;
    let r = require_single_r(cfg, Mode::Energy)?;
    let geom = geometry_at(cfg, r)?;
    let result = EnergyResult::evaluate(rho, &cfg.dipole_a, &cfg.dipole_b, &geom)
        .map_err(AppError::from_domain)?;
    let q = quantum_classicality(rho);

    let mut out = Output::new(Mode::Energy);
    out.line("r", fe(r));
    out.line("omega0_r", fe(geom.omega0_r()));
    out.line("steady_energy", fe(result.steady));
    if flags.dimensionless {
        out.line(
            "dimensionless_energy",
            fe(dimensionless_energy(
                result.steady,
                &geom,
                &cfg.dipole_a,
                &cfg.dipole_b,
            )),
        );
    }
    out.line("q", fe(q));
    out.line(
        "oscillating_amplitude_re",
        fe(result.oscillating_amplitude.re),
    );
    out.line(
        "oscillating_amplitude_im",
        fe(result.oscillating_amplitude.im),
    );

    let header = "r,omega0_r,steady_energy,dimensionless_energy,q,oscillating_amplitude_re,oscillating_amplitude_im";
    let row = [
        fe(r),
        fe(geom.omega0_r()),
        fe(result.steady),
        fe(dimensionless_energy(
            result.steady,
            &geom,
            &cfg.dipole_a,
            &cfg.dipole_b,
        )),
        fe(q),
        fe(result.oscillating_amplitude.re),
        fe(result.oscillating_amplitude.im),
    ]
    .join(",");
    out.table(header, vec![row]);
    out.emit(cfg.output_path.as_ref())
}

fn run_tensor(cfg: &ResolvedConfig) -> Result<(), AppError> {
    let r = require_single_r(cfg, Mode::Tensor)?;
    let geom = geometry_at(cfg, r)?;
    let tensor = dipole_tensor(&geom);
    let v = tensor.matrix();

    let mut out = Output::new(Mode::Tensor);
    out.line("r", fe(r));
    out.line("omega0_r", fe(geom.omega0_r()));
    out.line("trace", fe(tensor.trace()));

    let rows = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| format!("{i},{j},{}", fe(v[(i, j)])))
        .collect();
    out.table("i,j,v_ij", rows);
    out.emit(cfg.output_path.as_ref())
}

fn run_coherence(cfg: &ResolvedConfig) -> Result<(), AppError> {
    let rho = require_state(cfg, Mode::Coherence)?;
    let q = quantum_classicality(rho);
    let l1 = l1_coherence(rho);
    let conc = concurrence(rho);
    let nonpolar_a = is_nonpolar(rho, &cfg.dipole_a, Atom::A, &cfg.tolerances);
    let nonpolar_b = is_nonpolar(rho, &cfg.dipole_b, Atom::B, &cfg.tolerances);

    let mut out = Output::new(Mode::Coherence);
    out.line("q", fe(q));
    out.line("l1", fe(l1));
    out.line("concurrence", fe(conc));
    out.line("nonpolar_a", format!("{nonpolar_a}"));
    out.line("nonpolar_b", format!("{nonpolar_b}"));

    let row = format!(
        "{},{},{},{nonpolar_a},{nonpolar_b}",
        fe(q),
        fe(l1),
        fe(conc)
    );
    out.table("q,l1,concurrence,nonpolar_a,nonpolar_b", vec![row]);
    out.emit(cfg.output_path.as_ref())
}

struct SweepRow {
    r: f64,
    omega0_r: f64,
    steady: f64,
    dimensionless: f64,
    q: f64,
}

fn sweep_rows(cfg: &ResolvedConfig, mode: Mode) -> Result<Vec<SweepRow>, AppError> {
    let rho = require_state(cfg, mode)?;
    let rs = require_r_values(cfg, mode)?;
    rs.par_iter()
        .map(|&r| {
            let geom = geometry_at(cfg, r)?;
            let steady = steady_energy(rho, &cfg.dipole_a, &cfg.dipole_b, &geom)
                .map_err(AppError::from_domain)?;
            Ok(SweepRow {
                r,
                omega0_r: geom.omega0_r(),
                steady,
                dimensionless: dimensionless_energy(steady, &geom, &cfg.dipole_a, &cfg.dipole_b),
                q: quantum_classicality(rho),
            })
        })
        .collect()
}

fn sweep_table(cfg: &ResolvedConfig, flags: &Flags, rows: &[SweepRow]) -> (String, Vec<String>) {
    // l1 and concurrence depend only on the state, so they are constant
    // down a sweep; the columns exist for downstream uniformity
    let coherence_cols = flags.coherence.then(|| {
        let rho = cfg.state.as_ref().expect("state checked by sweep_rows");
        (l1_coherence(rho), concurrence(rho))
    });
    let mut header = "r,omega0_r,steady_energy,dimensionless_energy,q".to_string();
    if coherence_cols.is_some() {
        header.push_str(",l1,concurrence");
    }
    let lines = rows
        .iter()
        .map(|row| {
            let mut line = [
                fe(row.r),
                fe(row.omega0_r),
                fe(row.steady),
                fe(row.dimensionless),
                fe(row.q),
            ]
            .join(",");
            if let Some((l1, conc)) = coherence_cols {
                line.push(',');
                line.push_str(&fe(l1));
                line.push(',');
                line.push_str(&fe(conc));
            }
            line
        })
        .collect();
    (header, lines)
}

fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(r, e) in points {
        let x = r.ln();
        let y = e.abs().ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// `sweep` writes the table; `slope-fit` additionally reports the log-log
/// least-squares slope of |steady_energy| against r.
fn run_sweep(cfg: &ResolvedConfig, flags: &Flags, mode: Mode) -> Result<(), AppError> {
    let rows = sweep_rows(cfg, mode)?;
    let mut out = Output::new(mode);
    out.line("points", format!("{}", rows.len()));
    if mode == Mode::SlopeFit {
        let points: Vec<(f64, f64)> = rows.iter().map(|row| (row.r, row.steady)).collect();
        if points.iter().any(|(_, e)| *e == 0.0) {
            return Err(AppError::config(
                "slope-fit needs nonzero energies; the configured state has no steady interaction",
            ));
        }
        out.line("slope", fe(log_log_slope(&points)));
    }
    let (header, lines) = sweep_table(cfg, flags, &rows);
    out.table(&header, lines);
    out.emit(cfg.output_path.as_ref())
}

fn run_scan(cfg: &ResolvedConfig, flags: &Flags) -> Result<(), AppError> {
    let r = require_single_r(cfg, Mode::Scan)?;
    let geom = geometry_at(cfg, r)?;
    let scan = cfg.scan.as_ref().ok_or_else(|| {
        AppError::config("mode scan requires a [scan] section (theta and phi, or p)")
    })?;

    let states: Vec<(Vec<f64>, TwoAtomState)> = match scan {
        ResolvedScan::PureGrid { thetas, phis } => thetas
            .iter()
            .flat_map(|&theta| phis.iter().map(move |&phi| (theta, phi)))
            .map(|(theta, phi)| (vec![theta, phi], pure_state(theta, phi)))
            .collect(),
        ResolvedScan::WernerLine { ps } => ps
            .iter()
            .map(|&p| {
                werner_state(p)
                    .map(|rho| (vec![p], rho))
                    .map_err(AppError::from_domain)
            })
            .collect::<Result<_, _>>()?,
    };
    let label = match scan {
        ResolvedScan::PureGrid { .. } => "theta,phi",
        ResolvedScan::WernerLine { .. } => "p",
    };

    let lines: Vec<String> = states
        .par_iter()
        .map(|(coords, rho)| {
            let steady = steady_energy(rho, &cfg.dipole_a, &cfg.dipole_b, &geom)
                .map_err(AppError::from_domain)?;
            let mut fields: Vec<String> = coords.iter().map(|&x| fe(x)).collect();
            fields.push(fe(steady));
            fields.push(fe(dimensionless_energy(
                steady,
                &geom,
                &cfg.dipole_a,
                &cfg.dipole_b,
            )));
            fields.push(fe(quantum_classicality(rho)));
            if flags.coherence {
                fields.push(fe(l1_coherence(rho)));
                fields.push(fe(concurrence(rho)));
            }
            Ok(fields.join(","))
        })
        .collect::<Result<_, _>>()?;

    let mut header = format!("{label},steady_energy,dimensionless_energy,q");
    if flags.coherence {
        header.push_str(",l1,concurrence");
    }

    let mut out = Output::new(Mode::Scan);
    out.line("r", fe(r));
    out.line("omega0_r", fe(geom.omega0_r()));
    out.line("points", format!("{}", lines.len()));
    out.table(&header, lines);
    out.emit(cfg.output_path.as_ref())
}

fn run_oracle_check(cfg: &ResolvedConfig, flags: &Flags) -> Result<(), AppError> {
    let rho = require_state(cfg, Mode::OracleCheck)?;
    let r = require_single_r(cfg, Mode::OracleCheck)?;
    let geom = geometry_at(cfg, r)?;

    let closed = steady_energy(rho, &cfg.dipole_a, &cfg.dipole_b, &geom)
        .map_err(AppError::from_domain)?;
    let oracle = oracle_steady_energy(rho, &cfg.dipole_a, &cfg.dipole_b, &geom, &cfg.oracle)
        .map_err(AppError::from_domain)?;
    let abs_diff = (oracle.value - closed).abs();
    let rel_diff = abs_diff / closed.abs().max(oracle.value.abs()).max(f64::MIN_POSITIVE);

    let mut out = Output::new(Mode::OracleCheck);
    out.line("r", fe(r));
    out.line("omega0_r", fe(geom.omega0_r()));
    out.line("closed_form", fe(closed));
    if flags.dimensionless {
        out.line(
            "closed_form_dimensionless",
            fe(dimensionless_energy(
                closed,
                &geom,
                &cfg.dipole_a,
                &cfg.dipole_b,
            )),
        );
    }
    out.line("oracle_value", fe(oracle.value));
    out.line("abs_diff", fe(abs_diff));
    out.line("rel_diff", fe(rel_diff));
    out.line("estimated_error", fe(oracle.estimated_error));
    out.line(
        "eta_rows",
        format!("{}", oracle.eta_extrapolation_table.len()),
    );

    let header = "r,omega0_r,closed_form,oracle_value,rel_diff,estimated_error";
    let row = [
        fe(r),
        fe(geom.omega0_r()),
        fe(closed),
        fe(oracle.value),
        fe(rel_diff),
        fe(oracle.estimated_error),
    ]
    .join(",");
    out.table(header, vec![row]);
    out.emit(cfg.output_path.as_ref())
}
