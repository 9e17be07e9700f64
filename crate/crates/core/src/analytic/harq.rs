//! Soft-combining HARQ: the variance-scaling approximation, the exact
//! two-transmission frame error probability of a bounded-distance decoder,
//! and the Bob/Eve system recursions.

use serde::{Deserialize, Serialize};

use crate::analytic::bounded::BoundedDistance;
use crate::analytic::special::{half_erfc, integrate, log_add};
use crate::channel::{db_to_linear, linear_to_db};
use crate::error::AnalyticError;

/// Relative tolerance of the outer quadrature.
pub const QUADRATURE_REL_TOL: f64 = 1e-9;

/// `f_Q(x dB) = f(x + 10·log10(Q) dB)`: averaging `Q` copies divides the
/// noise variance by `Q`.
pub fn harq_fer_approx<F: Fn(f64) -> f64>(f: F, eb_n0_db: f64, q: usize) -> f64 {
    f(eb_n0_db + linear_to_db(q as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarqSpec {
    pub q_max: usize,
    /// Bob's minus Eve's Eb/N0 in dB; negative when Eve's channel is better.
    pub sg_db: f64,
}

/// Joint per-bit outcomes of the first transmission `x` and the average of
/// two transmissions, with `N0 = 1`:
///
/// * `p1`: first wrong, combined right
/// * `p2`: both right
/// * `p3`: first right, combined wrong
/// * `p4`: both wrong
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactHarqIntegrand {
    pub alpha: f64,
    pub rate: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl ExactHarqIntegrand {
    pub fn new(eb_n0_db: f64, rate: f64) -> Result<Self, AnalyticError> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(AnalyticError::InvalidArgument(format!("rate {rate}")));
        }
        let sqrt_eb = db_to_linear(eb_n0_db).sqrt();
        let alpha = -sqrt_eb;
        let sr = rate.sqrt();
        let g = move |x: f64| (-x * x * rate).exp() / (std::f64::consts::PI / rate).sqrt();
        let beta = move |x: f64| -2.0 * sqrt_eb - x;
        // ∫_β^∞ g = ½erfc(β√R), ∫_{-∞}^β g = ½erfc(-β√R)
        let above = move |x: f64| g(x) * half_erfc(beta(x) * sr);
        let below = move |x: f64| g(x) * half_erfc(-beta(x) * sr);
        let span = 40.0 / (2.0 * rate).sqrt();
        let lo = alpha - span;
        let hi = alpha.max(0.0) + span;
        let q = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| integrate(f, a, b, QUADRATURE_REL_TOL, 0.0);
        Ok(ExactHarqIntegrand {
            alpha,
            rate,
            p1: q(&above, lo, alpha)?,
            p2: q(&above, alpha, hi)?,
            p3: q(&below, alpha, hi)?,
            p4: q(&below, lo, alpha)?,
        })
    }

    /// Bit error probability of one transmission.
    pub fn p0(&self) -> f64 {
        self.p1 + self.p4
    }

    pub fn total(&self) -> f64 {
        self.p1 + self.p2 + self.p3 + self.p4
    }
}

/// Frame error probability at the second decoding attempt, conditioned on
/// the first having failed, for a `t`-error-correcting code.
///
/// Evaluated as the failure probability directly: given `i > t` first-shot
/// errors, the combined word keeps `m ~ Binom(i, p4/p0)` of them and gains
/// `l ~ Binom(n-i, p3/(1-p0))` new ones, and fails when `m + l > t`.
pub fn harq_fer_exact_q2(code: &BoundedDistance, eb_n0_db: f64) -> Result<f64, AnalyticError> {
    let ig = ExactHarqIntegrand::new(eb_n0_db, code.rate())?;
    Ok(exact_q2_failure(code, &ig))
}

fn exact_q2_failure(code: &BoundedDistance, ig: &ExactHarqIntegrand) -> f64 {
    let (n, t) = (code.n(), code.t());
    let lf = code.ln_factorial();
    let p0 = ig.p0();
    let keep = ig.p4 / p0;
    let gain = ig.p3 / (1.0 - p0);
    let ln_pf = lf.binom_sf(n, t, p0).ln();
    let mode = ((n + 1) as f64 * p0).floor() as usize;
    let mut ln_total = f64::NEG_INFINITY;
    for i in t + 1..=n {
        let ln_first = lf.ln_binom_pmf(n, i, p0);
        let rest = n - i;
        let sf_gain = lf.ln_sf_table(rest, gain);
        // m > t fails regardless of the new errors
        let mut ln_fail = ln_binom_upper(lf, i, t, keep);
        for m in 0..=t.min(i) {
            let need = t - m;
            let ln_new = if need >= rest { f64::NEG_INFINITY } else { sf_gain[need] };
            ln_fail = log_add(ln_fail, lf.ln_binom_pmf(i, m, keep) + ln_new);
        }
        let term = ln_first + ln_fail;
        ln_total = log_add(ln_total, term);
        if i > mode && term < ln_total + (1e-18f64).ln() {
            break;
        }
    }
    (ln_total - ln_pf).exp().min(1.0)
}

fn ln_binom_upper(lf: &crate::analytic::special::LnFactorial, n: usize, t: usize, p: f64) -> f64 {
    let v = lf.binom_sf(n, t, p);
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// The success-sum form, `1 - P_f^{-1}·Σ_i C(n,i) Σ_j C(i,j) P1^j P4^(i-j)
/// Σ_l C(n-i,l) P3^l P2^(n-i-l)`, term by term. Loses precision once the
/// result is far below one; kept as a cross-check.
pub fn harq_fer_exact_q2_success_form(code: &BoundedDistance, eb_n0_db: f64) -> Result<f64, AnalyticError> {
    let ig = ExactHarqIntegrand::new(eb_n0_db, code.rate())?;
    let (n, t) = (code.n(), code.t());
    let lf = code.ln_factorial();
    let (l1, l2, l3, l4) = (ig.p1.ln(), ig.p2.ln(), ig.p3.ln(), ig.p4.ln());
    let mut sum = 0.0;
    for i in t + 1..=n {
        let mut inner_i = 0.0;
        for j in i - t..=i {
            let mut inner_j = 0.0;
            for l in 0..=(t + j - i).min(n - i) {
                inner_j += (lf.ln_binom(n - i, l) + l as f64 * l3 + (n - i - l) as f64 * l2).exp();
            }
            inner_i += (lf.ln_binom(i, j) + j as f64 * l1 + (i - j) as f64 * l4).exp() * inner_j;
        }
        sum += (lf.ln_binom(n, i)).exp() * inner_i;
    }
    let pf = lf.binom_sf(n, t, ig.p0());
    Ok(1.0 - sum / pf)
}

/// Frame error probabilities of Bob and Eve under the HARQ protocol, given
/// the per-attempt frame error probability `pf_q(eb_n0_db, q)` after
/// combining `q` transmissions.
///
/// Bob receives transmission `Q` when his first `Q-1` attempts failed; Eve
/// gets a useful copy only when both she and Bob failed before.
pub fn harq_system_fer<F: Fn(f64, usize) -> f64>(spec: &HarqSpec, pf_q: F, eb_n0_bob_db: f64) -> (f64, f64) {
    let eve_db = eb_n0_bob_db - spec.sg_db;
    // failure sums, not 1 - success, so tiny FERs keep their precision
    let (mut fail_b, mut reach_e, mut fail_e) = (1.0, 1.0, 0.0);
    for q in 1..=spec.q_max {
        let fb = pf_q(eb_n0_bob_db, q);
        let fe = pf_q(eve_db, q);
        let stop = if q == spec.q_max { 1.0 } else { 1.0 - fb };
        fail_e += reach_e * fe * stop;
        fail_b *= fb;
        reach_e *= fb * fe;
    }
    (fail_b, fail_e)
}
