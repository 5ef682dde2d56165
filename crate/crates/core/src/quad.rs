//! Quadrature toolkit backing the oracle: 15-point Gauss-Kronrod panels,
//! globally adaptive refinement, Wynn's epsilon acceleration for
//! oscillatory tail series, and Neville extrapolation to zero.
//!
//! Everything here is plain numerics with no knowledge of the physics;
//! the oracle composes these pieces. Integrands may be scalar or carry
//! several components at once (the [`PairCx`] type integrates two complex
//! channels in lockstep so they share panel refinement).

use num_complex::Complex64;
use std::collections::BinaryHeap;

/// Values a quadrature rule can accumulate.
pub(crate) trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

/// Two complex channels integrated together over the same panels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PairCx {
    pub a: Complex64,
    pub b: Complex64,
}

impl PairCx {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }
}

impl QuadValue for PairCx {
    fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }
    fn add(self, other: Self) -> Self {
        Self::new(self.a + other.a, self.b + other.b)
    }
    fn sub(self, other: Self) -> Self {
        Self::new(self.a - other.a, self.b - other.b)
    }
    fn scale(self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s)
    }
    fn norm(self) -> f64 {
        self.a.norm() + self.b.norm()
    }
}

/// Positive Kronrod abscissae of the 15-point rule on [-1, 1]
/// (odd-indexed entries are the embedded 7-point Gauss abscissae).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

/// Kronrod weights matching XGK.
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Weights of the embedded 7-point Gauss rule (for XGK[1], XGK[3],
/// XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// One integrated panel: Kronrod value, error estimate, and ∫|f|.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel<T> {
    pub lo: f64,
    pub hi: f64,
    pub value: T,
    pub error: f64,
    pub resabs: f64,
}

/// 15-point Gauss-Kronrod rule on [lo, hi]; 15 evaluations.
///
/// The error estimate follows the standard practice: the Gauss/Kronrod
/// difference sharpened against the variation ∫|f − mean| so that smooth
/// panels are not flagged, with a round-off floor tied to ∫|f|.
pub(crate) fn gk15<T: QuadValue>(f: &mut impl FnMut(f64) -> T, lo: f64, hi: f64) -> Panel<T> {
    let half = 0.5 * (hi - lo);
    let center = 0.5 * (lo + hi);

    let f_center = f(center);
    let mut samples = [[T::zero(); 2]; 7];
    for (k, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[k];
        sample[0] = f(center - dx);
        sample[1] = f(center + dx);
    }

    let mut kronrod = f_center.scale(WGK[7]);
    let mut resabs = f_center.norm() * WGK[7];
    let mut gauss = f_center.scale(WG[3]);
    for (k, sample) in samples.iter().enumerate() {
        let pair_sum = sample[0].add(sample[1]);
        kronrod = kronrod.add(pair_sum.scale(WGK[k]));
        resabs += WGK[k] * (sample[0].norm() + sample[1].norm());
        if k % 2 == 1 {
            gauss = gauss.add(pair_sum.scale(WG[k / 2]));
        }
    }

    let mean = kronrod.scale(0.5);
    let mut resasc = f_center.sub(mean).norm() * WGK[7];
    for (k, sample) in samples.iter().enumerate() {
        resasc += WGK[k] * (sample[0].sub(mean).norm() + sample[1].sub(mean).norm());
    }

    let value = kronrod.scale(half);
    resabs *= half.abs();
    resasc *= half.abs();

    let raw = kronrod.sub(gauss).norm() * half.abs();
    let mut error = raw;
    if resasc != 0.0 && raw != 0.0 {
        error = resasc * (200.0 * raw / resasc).powf(1.5).min(1.0);
    }
    let round_off = 50.0 * f64::EPSILON * resabs;
    if error < round_off {
        error = round_off;
    }

    Panel {
        lo,
        hi,
        value,
        error,
        resabs,
    }
}

struct HeapPanel<T>(Panel<T>);

impl<T> PartialEq for HeapPanel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.0.error == other.0.error
    }
}
impl<T> Eq for HeapPanel<T> {}
impl<T> PartialOrd for HeapPanel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for HeapPanel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Outcome of an adaptive integration; `converged` is false when the
/// evaluation budget ran out before the tolerance was met.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AdaptiveOutcome<T> {
    pub value: T,
    pub error: f64,
    pub resabs: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Globally adaptive Gauss-Kronrod integration over the panels defined by
/// consecutive `breakpoints` (ascending). The worst panel is bisected
/// until the summed error estimate drops below
/// `rel_tol · max(resabs, |value|)` or `max_evals` is spent.
pub(crate) fn integrate_adaptive<T: QuadValue>(
    f: &mut impl FnMut(f64) -> T,
    breakpoints: &[f64],
    rel_tol: f64,
    max_evals: usize,
) -> AdaptiveOutcome<T> {
    assert!(breakpoints.len() >= 2, "need at least one panel");
    let span = breakpoints[breakpoints.len() - 1] - breakpoints[0];
    let mut evals = 0usize;
    let mut heap = BinaryHeap::new();
    let mut total_error = 0.0;
    let mut total_resabs = 0.0;
    let mut total_value = T::zero();

    for w in breakpoints.windows(2) {
        let panel = gk15(f, w[0], w[1]);
        evals += 15;
        total_error += panel.error;
        total_resabs += panel.resabs;
        total_value = total_value.add(panel.value);
        heap.push(HeapPanel(panel));
    }

    let mut converged = true;
    loop {
        let target = rel_tol * total_resabs.max(total_value.norm());
        if total_error <= target {
            break;
        }
        if evals + 30 > max_evals {
            converged = false;
            break;
        }
        let worst = heap.pop().expect("heap is nonempty").0;
        if (worst.hi - worst.lo).abs() <= 1e-14 * span.abs() {
            // cannot refine further at f64 resolution; keep as-is
            heap.push(HeapPanel(worst));
            break;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = gk15(f, worst.lo, mid);
        let right = gk15(f, mid, worst.hi);
        evals += 30;
        total_error += left.error + right.error - worst.error;
        total_resabs += left.resabs + right.resabs - worst.resabs;
        total_value = total_value.add(left.value.add(right.value).sub(worst.value));
        heap.push(HeapPanel(left));
        heap.push(HeapPanel(right));
    }

    // Recompute the totals from the surviving panels in a fixed order to
    // avoid incremental-update drift.
    let mut panels: Vec<Panel<T>> = heap.into_iter().map(|p| p.0).collect();
    panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    let mut value = T::zero();
    let mut error = 0.0;
    let mut resabs = 0.0;
    for p in &panels {
        value = value.add(p.value);
        error += p.error;
        resabs += p.resabs;
    }

    AdaptiveOutcome {
        value,
        error,
        resabs,
        evals,
        converged,
    }
}

/// Wynn's epsilon algorithm: accelerated limit of a sequence of partial
/// sums, with a crude error estimate from the last stable step.
///
/// Handles alternating (even polynomially growing) oscillatory tails,
/// converging to their Abel-summed value.
pub(crate) fn wynn_epsilon(sums: &[Complex64]) -> (Complex64, f64) {
    let n = sums.len();
    assert!(n >= 3, "need at least three partial sums");
    let mut prev_prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1]; // ε_{-1}
    let mut prev: Vec<Complex64> = sums.to_vec(); // ε_0
    let mut best = *sums.last().expect("nonempty");
    let mut best_err = f64::INFINITY;
    let mut last_even = best;

    for col in 1..n {
        let rows = n - col;
        let mut current = Vec::with_capacity(rows);
        let mut degenerate = false;
        for i in 0..rows {
            let delta = prev[i + 1] - prev[i];
            if delta.norm() < 1e-280 {
                degenerate = true;
                break;
            }
            current.push(prev_prev[i + 1] + delta.inv());
        }
        if degenerate {
            // differences vanished: the sequence already converged
            best = prev[0];
            best_err = 0.0;
            break;
        }
        if col % 2 == 0 {
            let head = current[rows - 1];
            let err = (head - last_even).norm();
            if err < best_err {
                best = head;
                best_err = err;
            }
            last_even = head;
        }
        prev_prev = prev;
        prev = current;
    }

    if !best_err.is_finite() {
        best_err = (best - sums[n - 1]).norm();
    }
    (best, best_err)
}

/// Neville polynomial extrapolation of (xs, ys) samples to x = 0, with an
/// error estimate from the last diagonal step. xs must be distinct.
pub(crate) fn neville_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 2 && n == ys.len(), "need at least two samples");
    let mut p = ys.to_vec();
    let mut diag_prev = p[0];
    let mut estimate = p[n - 1];
    let mut err = f64::INFINITY;
    for k in 1..n {
        for i in 0..(n - k) {
            // value at x = 0 of the polynomial through x_i ... x_{i+k}
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
        let diag = p[0];
        err = (diag - diag_prev).abs();
        diag_prev = diag;
        estimate = diag;
    }
    (estimate, err)
}
