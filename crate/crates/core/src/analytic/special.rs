//! Numerical building blocks: erfc, log-binomials, binomial tails,
//! adaptive Gauss–Kronrod quadrature and bisection.

use crate::error::AnalyticError;

/// Terms smaller than this fraction of the running sum end a tail sum.
pub const TAIL_TRUNCATION: f64 = 1e-18;

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `½·erfc(x)`, the Gaussian tail at `x·√2`.
pub fn half_erfc(x: f64) -> f64 {
    0.5 * libm::erfc(x)
}

/// `ln n!` for `n` up to a fixed size, from `lgamma`.
#[derive(Debug, Clone)]
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn new(max_n: usize) -> Self {
        let table = (0..=max_n).map(|i| libm::lgamma(i as f64 + 1.0)).collect();
        LnFactorial { table }
    }

    pub fn max_n(&self) -> usize {
        self.table.len() - 1
    }

    pub fn ln_fact(&self, n: usize) -> f64 {
        self.table[n]
    }

    /// `ln C(n, k)`; `-inf` when `k > n`.
    pub fn ln_binom(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        self.table[n] - self.table[k] - self.table[n - k]
    }

    /// `ln [C(n, i) p^i (1-p)^(n-i)]`.
    pub fn ln_binom_pmf(&self, n: usize, i: usize, p: f64) -> f64 {
        if i > n {
            return f64::NEG_INFINITY;
        }
        self.ln_binom(n, i) + xlogy(i, p) + xlog1my(n - i, p)
    }

    /// Log of the upper tail `P[X > t]` for every `t` in `0..=n`, with
    /// `X ~ Binom(n, p)`. Entry `n` is `-inf`.
    pub fn ln_sf_table(&self, n: usize, p: f64) -> Vec<f64> {
        let mut out = vec![f64::NEG_INFINITY; n + 1];
        let mut acc = f64::NEG_INFINITY;
        for t in (0..n).rev() {
            acc = log_add(acc, self.ln_binom_pmf(n, t + 1, p));
            out[t] = acc;
        }
        out
    }

    /// `Σ_{i=t+1}^{n} weight(i) · C(n,i) p^i (1-p)^(n-i)`, summed from the
    /// largest term outwards and truncated once terms fall below
    /// [`TAIL_TRUNCATION`] of the running sum.
    pub fn binom_tail_weighted<F: Fn(usize) -> f64>(&self, n: usize, t: usize, p: f64, weight: F) -> f64 {
        if t >= n {
            return 0.0;
        }
        let mode = (((n + 1) as f64 * p).floor() as usize).min(n);
        let start = mode.max(t + 1);
        let ln_peak = self.ln_binom_pmf(n, start, p);
        if ln_peak == f64::NEG_INFINITY {
            return 0.0;
        }
        let cut = TAIL_TRUNCATION.ln();
        let mut sum: f64 = 0.0;
        for i in start..=n {
            let rel = self.ln_binom_pmf(n, i, p) - ln_peak;
            if rel < cut + sum.max(1.0).ln() {
                break;
            }
            sum += rel.exp() * weight(i);
        }
        for i in (t + 1..start).rev() {
            let rel = self.ln_binom_pmf(n, i, p) - ln_peak;
            if rel < cut + sum.max(1.0).ln() {
                break;
            }
            sum += rel.exp() * weight(i);
        }
        sum * ln_peak.exp()
    }

    /// `P[X > t]` for `X ~ Binom(n, p)`, clipped to 1 against rounding.
    pub fn binom_sf(&self, n: usize, t: usize, p: f64) -> f64 {
        self.binom_tail_weighted(n, t, p, |_| 1.0).min(1.0)
    }
}

fn xlogy(i: usize, p: f64) -> f64 {
    if i == 0 {
        0.0
    } else {
        i as f64 * p.ln()
    }
}

fn xlog1my(i: usize, p: f64) -> f64 {
    if i == 0 {
        0.0
    } else {
        i as f64 * (-p).ln_1p()
    }
}

pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `1 - (1 - p)^k` without cancellation.
pub fn at_least_one(p: f64, k: f64) -> f64 {
    -(k * (-p).ln_1p()).exp_m1()
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = GK_WEIGHTS[7] * fc;
    let mut gauss = G7_WEIGHTS[3] * fc;
    for j in 0..7 {
        let dx = h * GK_NODES[j];
        let s = f(c - dx) + f(c + dx);
        kron += GK_WEIGHTS[j] * s;
        if j % 2 == 1 {
            gauss += G7_WEIGHTS[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Intervals are split until the summed error estimate is below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64, AnalyticError> {
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(AnalyticError::Quadrature { estimate: err });
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Bisection for a root of a continuous `f` with a sign change on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Eb/N0 [dB] where a decreasing error curve `f` crosses `target`, searched
/// in log10 on `[lo, hi]`.
pub fn waterline<F: Fn(f64) -> f64>(f: F, target: f64, lo: f64, hi: f64) -> Result<f64, AnalyticError> {
    bisect(|x| f(x).max(1e-300).log10() - target.log10(), lo, hi, 1e-6)
        .ok_or(AnalyticError::NotBracketed { threshold: target })
}
