//! Bounded-distance decoding of a `t`-error-correcting `(n, k)` code.
//!
//! A frame fails when more than `t` channel errors occur and the decoder
//! then leaves the received bits untouched, so residual errors are the
//! channel errors themselves.

use crate::analytic::special::{half_erfc, LnFactorial};
use crate::analytic::unitary::OddSelection;
use crate::channel::db_to_linear;
use crate::error::AnalyticError;

#[derive(Debug, Clone)]
pub struct BoundedDistance {
    n: usize,
    k: usize,
    t: usize,
    lf: LnFactorial,
}

/// Error probabilities at one SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodedRates {
    pub pe: f64,
    pub pf: f64,
    /// Channel bit error probability after the rate penalty.
    pub p0: f64,
}

impl BoundedDistance {
    pub fn new(n: usize, k: usize, t: usize) -> Result<Self, AnalyticError> {
        if k == 0 || k > n || t > n {
            return Err(AnalyticError::InvalidArgument(format!("(n, k, t) = ({n}, {k}, {t})")));
        }
        Ok(BoundedDistance { n, k, t, lf: LnFactorial::new(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub(crate) fn ln_factorial(&self) -> &LnFactorial {
        &self.lf
    }

    /// `½·erfc(√(Eb/N0 · k/n))`.
    pub fn p0(&self, eb_n0_db: f64) -> f64 {
        half_erfc((db_to_linear(eb_n0_db) * self.rate()).sqrt())
    }

    pub fn rates(&self, eb_n0_db: f64) -> CodedRates {
        let p0 = self.p0(eb_n0_db);
        let n = self.n as f64;
        CodedRates {
            pf: self.lf.binom_sf(self.n, self.t, p0),
            pe: self.lf.binom_tail_weighted(self.n, self.t, p0, |i| i as f64 / n),
            p0,
        }
    }

    pub fn pf(&self, eb_n0_db: f64) -> f64 {
        self.lf.binom_sf(self.n, self.t, self.p0(eb_n0_db))
    }

    /// Half the frame error probability.
    pub fn perfect_scrambling(&self, eb_n0_db: f64) -> f64 {
        0.5 * self.pf(eb_n0_db)
    }

    /// Probability that exactly `j` information bits are wrong and the
    /// frame is not decodable, for `j` in `0..=k`.
    pub fn info_error_distribution(&self, eb_n0_db: f64) -> Vec<f64> {
        let p0 = self.p0(eb_n0_db);
        let r = self.n - self.k;
        let sf_r = self.lf.ln_sf_table(r, p0);
        (0..=self.k)
            .map(|j| {
                let ln_tail = if j > self.t { 0.0 } else { sf_r[(self.t - j).min(r)] };
                (self.lf.ln_binom_pmf(self.k, j, p0) + ln_tail).exp()
            })
            .collect()
    }

    /// Bit error probability after a real descrambler of column weight `w`.
    pub fn scrambled_ber(&self, eb_n0_db: f64, sel: &OddSelection) -> Result<f64, AnalyticError> {
        if sel.k() != self.k {
            return Err(AnalyticError::InvalidArgument(format!(
                "descrambler size {} differs from k = {}",
                sel.k(),
                self.k
            )));
        }
        Ok(sel.apply(&self.info_error_distribution(eb_n0_db)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::unitary::{scrambled_unitary_ber, uncoded_rates};

    #[test]
    fn no_correction_at_full_length_is_uncoded() {
        let code = BoundedDistance::new(64, 64, 0).unwrap();
        let sel = OddSelection::new(64, 9);
        for db in [0.0, 3.0, 6.0] {
            let a = code.scrambled_ber(db, &sel).unwrap();
            let b = scrambled_unitary_ber(db, &sel);
            assert!((a / b - 1.0).abs() < 1e-12);
            let r = code.rates(db);
            let (pe, pf) = uncoded_rates(db, 64);
            assert!((r.pe / pe - 1.0).abs() < 1e-12 && (r.pf / pf - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_correction_never_fails() {
        let code = BoundedDistance::new(31, 16, 31).unwrap();
        assert_eq!(code.rates(0.0).pf, 0.0);
    }

    #[test]
    fn small_code_by_enumeration() {
        // (7, 4, 1): enumerate all 2^7 error patterns
        let code = BoundedDistance::new(7, 4, 1).unwrap();
        let db = 2.0;
        let p = code.p0(db);
        let (mut pf, mut pe) = (0.0, 0.0);
        let mut p_j = [0.0; 5];
        for e in 0u32..128 {
            let w = e.count_ones() as i32;
            let pr = p.powi(w) * (1.0 - p).powi(7 - w);
            if w > 1 {
                pf += pr;
                pe += pr * w as f64 / 7.0;
                p_j[(e & 0xf).count_ones() as usize] += pr;
            }
        }
        let r = code.rates(db);
        assert!((r.pf / pf - 1.0).abs() < 1e-12);
        assert!((r.pe / pe - 1.0).abs() < 1e-12);
        for (a, b) in code.info_error_distribution(db).iter().zip(p_j) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
