//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{ConeError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_panels: 4000 }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions { abs_tol, rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    let mut abs_k = rk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        rk += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * rk;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = rk * h;
    let asc = asc * h.abs();
    let abs_k = abs_k * h.abs();
    let mut err = ((rk - rg) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (1.0_f64).min((200.0 * err / asc).powf(1.5));
    }
    let floor = 50.0 * f64::EPSILON * abs_k;
    if abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (value, err)
}

/// Integrates `f` over `[a, b]`, bisecting the panel with the largest error estimate.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(ConeError::Domain(format!("quadrature bounds must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evals: 0 });
    }
    let (v, e) = kronrod15(&mut f, a, b);
    let mut evals = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    // Requests below the rounding floor of the panel rule are clamped to it.
    let rel_tol = opts.rel_tol.max(200.0 * f64::EPSILON);
    loop {
        if !total.is_finite() {
            return Err(ConeError::NonFinite(format!("integrand on [{a}, {b}]")));
        }
        let target = opts.abs_tol.max(rel_tol * total.abs());
        if total_err <= target {
            return Ok(QuadResult { value: total, error: total_err, evals });
        }
        if heap.len() >= opts.max_panels {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod15(&mut f, worst.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, worst.b);
        evals += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated drift before judging the final estimate.
    let total: f64 = heap.iter().map(|p| p.value).sum();
    let total_err: f64 = heap.iter().map(|p| p.error).sum();
    let target = opts.abs_tol.max(rel_tol * total.abs());
    if total_err <= target {
        Ok(QuadResult { value: total, error: total_err, evals })
    } else {
        Err(ConeError::Quadrature { a, b, tol: target, estimate: total_err })
    }
}

/// Integrates over `[a, b]` split at the interior `breaks` (unsorted, out-of-range entries ignored).
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult> {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut nodes = Vec::with_capacity(pts.len() + 2);
    nodes.push(lo);
    nodes.extend(pts);
    nodes.push(hi);
    let pieces = (nodes.len() - 1) as f64;
    let piece_opts = QuadOptions { abs_tol: opts.abs_tol / pieces, ..opts };
    let mut out = QuadResult { value: 0.0, error: 0.0, evals: 0 };
    for w in nodes.windows(2) {
        let r = integrate(&mut f, w[0], w[1], piece_opts)?;
        out.value += r.value;
        out.error += r.error;
        out.evals += r.evals;
    }
    out.value *= sign;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, QuadOptions::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn log_endpoint_singularity() {
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, QuadOptions::with_tol(1e-12, 1e-12)).unwrap();
        assert!((r.value + 1.0).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn breaks_and_reversed_bounds() {
        let f = |x: f64| (x - 0.3).abs().sqrt();
        let r = integrate_with_breaks(f, 1.0, 0.0, &[0.3, 5.0], QuadOptions::default()).unwrap();
        let exact = (2.0 / 3.0) * (0.3_f64.powf(1.5) + 0.7_f64.powf(1.5));
        assert!((r.value + exact).abs() < 1e-12);
    }

    #[test]
    fn infinite_bounds_rejected() {
        assert!(integrate(|x| x, 0.0, f64::INFINITY, QuadOptions::default()).is_err());
    }
}
