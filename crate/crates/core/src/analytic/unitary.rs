//! Unitary-rate transmission: uncoded BPSK, perfect and real scrambling,
//! and concatenated scrambling over `L` frames.

use crate::analytic::special::{at_least_one, half_erfc, LnFactorial};
use crate::channel::db_to_linear;

/// Uncoded BPSK bit and frame error probabilities for a `k`-bit frame.
pub fn uncoded_rates(eb_n0_db: f64, k: usize) -> (f64, f64) {
    let pe = half_erfc(db_to_linear(eb_n0_db).sqrt());
    (pe, at_least_one(pe, k as f64))
}

/// Every erred frame carries `k/2` random bit errors after descrambling.
pub fn perfect_scrambling_unitary(eb_n0_db: f64, k: usize) -> f64 {
    0.5 * uncoded_rates(eb_n0_db, k).1
}

/// Probability that a weight-`w` descrambler column selects an odd number
/// of the `j` erred positions, for every `j` in `0..=k`.
///
/// Entry `j` is `Σ_{i odd} C(j,i)·C(k-j,w-i) / C(k,w)`.
#[derive(Debug, Clone)]
pub struct OddSelection {
    k: usize,
    w: usize,
    h: Vec<f64>,
}

impl OddSelection {
    pub fn new(k: usize, w: usize) -> Self {
        assert!(w >= 1 && w <= k, "need 1 <= w <= k");
        let lf = LnFactorial::new(k);
        let denom = lf.ln_binom(k, w);
        let h = (0..=k)
            .map(|j| {
                let lo = w.saturating_sub(k - j);
                let mut s = 0.0;
                let mut i = lo | 1;
                while i <= j.min(w) {
                    s += (lf.ln_binom(j, i) + lf.ln_binom(k - j, w - i) - denom).exp();
                    i += 2;
                }
                s
            })
            .collect();
        OddSelection { k, w, h }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn get(&self, j: usize) -> f64 {
        self.h[j]
    }

    /// Average descrambled bit error probability given the distribution
    /// `p_j` of the number of erred information bits.
    pub fn apply(&self, p_j: &[f64]) -> f64 {
        p_j.iter().zip(&self.h).map(|(p, h)| p * h).sum()
    }
}

/// Bit error probability after a real descrambler with column weight `w`.
pub fn scrambled_unitary_ber(eb_n0_db: f64, sel: &OddSelection) -> f64 {
    let k = sel.k();
    let pe = uncoded_rates(eb_n0_db, k).0;
    let lf = LnFactorial::new(k);
    let p_j: Vec<f64> = (0..=k).map(|j| lf.ln_binom_pmf(k, j, pe).exp()).collect();
    sel.apply(&p_j)
}

/// Frame and bit error probabilities of an `L`-frame block under perfect
/// scrambling.
pub fn concat_perfect_scrambling(pf: f64, frames: usize) -> (f64, f64) {
    let pf_l = at_least_one(pf, frames as f64);
    (pf_l, 0.5 * pf_l)
}

/// Bit error probability after concatenated real scrambling: the parity of
/// `L` independent descrambled bits, each wrong with probability `pe_s`.
pub fn concat_real_scrambling(pe_s: f64, frames: usize) -> f64 {
    let lf = LnFactorial::new(frames);
    (1..=frames)
        .step_by(2)
        .map(|i| lf.ln_binom_pmf(frames, i, pe_s).exp())
        .sum()
}

/// Closed form of [`concat_real_scrambling`], `(1 - (1 - 2p)^L) / 2`.
pub fn concat_real_scrambling_closed(pe_s: f64, frames: usize) -> f64 {
    if pe_s <= 0.5 {
        // expm1 keeps the small-p regime free of cancellation
        -0.5 * (frames as f64 * (-2.0 * pe_s).ln_1p()).exp_m1()
    } else {
        0.5 * (1.0 - (1.0 - 2.0 * pe_s).powi(frames as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoded_reference_points() {
        let (pe, pf) = uncoded_rates(0.0, 1);
        assert!((pe - 0.078_649_603_525_142_2).abs() < 1e-12);
        assert_eq!(pe, pf);
        let (pe, _) = uncoded_rates(9.59, 385);
        assert!((pe / 1e-5 - 1.0).abs() < 0.02);
        assert_eq!(uncoded_rates(f64::INFINITY, 10), (0.0, 0.0));
    }

    #[test]
    fn single_bit_selection_is_fraction() {
        let sel = OddSelection::new(40, 1);
        for j in 0..=40 {
            assert!((sel.get(j) - j as f64 / 40.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_weight_selection_is_parity() {
        let sel = OddSelection::new(30, 30);
        for j in 0..=30 {
            assert_eq!(sel.get(j), (j % 2) as f64);
        }
    }

    #[test]
    fn odd_selection_by_enumeration() {
        // all w-subsets of 8 positions, j = 3 errors at the front
        let (k, w, j) = (8usize, 3usize, 3usize);
        let (mut odd, mut total) = (0, 0);
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize == w {
                total += 1;
                if (mask & 0b111).count_ones() % 2 == 1 {
                    odd += 1;
                }
            }
        }
        let sel = OddSelection::new(k, w);
        assert!((sel.get(j) - odd as f64 / total as f64).abs() < 1e-14);
    }

    #[test]
    fn concatenation_reference() {
        let direct = 4.0 * 0.1 * 0.9f64.powi(3) + 4.0 * 0.1f64.powi(3) * 0.9;
        assert!((concat_real_scrambling(0.1, 4) - direct).abs() < 1e-15);
        assert!((direct - 0.2952).abs() < 1e-12);
        assert!((concat_real_scrambling(0.5, 7) - 0.5).abs() < 1e-15);
        let (pf, pe) = concat_perfect_scrambling(0.3, 1);
        assert!((pf - 0.3).abs() < 1e-15 && (pe - 0.15).abs() < 1e-15);
    }
}
