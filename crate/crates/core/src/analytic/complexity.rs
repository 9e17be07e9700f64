//! Binary-operation counts for LDPC encoding and sum-product decoding.

use serde::{Deserialize, Serialize};

use crate::error::AnalyticError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransmissionMode {
    Systematic,
    Scrambled,
    Punctured,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityModel {
    /// Transmitted length.
    pub n: usize,
    /// Mother-code length seen by the decoder; equals `n` unless punctured.
    pub n_mother: usize,
    pub k: usize,
    /// Punctured positions.
    pub z: usize,
    /// Average variable-node degree.
    pub d_v: f64,
    /// Descrambler column weight.
    pub w: usize,
    /// Row/column weight of a sparse forward scrambler.
    pub s_weight: usize,
    pub i_ave: f64,
    /// Quantization bits.
    pub q: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityCost {
    pub c_enc: f64,
    pub c_dec: f64,
    pub c_spa: f64,
}

impl ComplexityCost {
    pub fn log2_enc(&self) -> f64 {
        self.c_enc.log2()
    }

    pub fn log2_dec(&self) -> f64 {
        self.c_dec.log2()
    }
}

impl ComplexityModel {
    /// `I_ave · n [q (8 d_v + 12 k/n - 11) + d_v]` on the decoder's length.
    pub fn c_spa(&self) -> f64 {
        let n = self.n_mother as f64;
        let k = self.k as f64;
        self.i_ave * n * (self.q as f64 * (8.0 * self.d_v + 12.0 * k / n - 11.0) + self.d_v)
    }

    /// Encoding and decoding costs. With `triangular`, encoding is
    /// back-substitution (ones of `H`) plus, when scrambled, the sparse `u·S`.
    pub fn cost(&self, mode: TransmissionMode, triangular: bool) -> Result<ComplexityCost, AnalyticError> {
        if self.n == 0 || self.k == 0 || self.k > self.n_mother || self.n > self.n_mother {
            return Err(AnalyticError::InvalidArgument(format!(
                "n = {}, n' = {}, k = {}",
                self.n, self.n_mother, self.k
            )));
        }
        let (n, k) = (self.n as f64, self.k as f64);
        let ones = self.n_mother as f64 * self.d_v;
        let c_spa = self.c_spa();
        let (c_enc, c_dec) = match mode {
            TransmissionMode::Systematic => {
                let enc = if triangular { ones } else { k * (n - k) / 2.0 };
                (enc, c_spa)
            }
            TransmissionMode::Scrambled => {
                if self.w == 0 {
                    return Err(AnalyticError::InvalidArgument("scrambled mode needs w".into()));
                }
                let enc = if triangular {
                    ones + k * self.s_weight as f64
                } else {
                    k * n / 2.0
                };
                (enc, c_spa + k * self.w as f64)
            }
            TransmissionMode::Punctured => {
                if self.z == 0 || self.n_mother - self.z != self.n {
                    return Err(AnalyticError::InvalidArgument(format!(
                        "punctured mode needs n' - z = n (n' = {}, z = {}, n = {})",
                        self.n_mother, self.z, self.n
                    )));
                }
                let enc = if triangular { ones } else { k * n / 2.0 };
                (enc, c_spa)
            }
        };
        Ok(ComplexityCost { c_enc, c_dec, c_spa })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn systematic() -> ComplexityModel {
        ComplexityModel {
            n: 511,
            n_mother: 511,
            k: 385,
            z: 0,
            d_v: 3.8,
            w: 0,
            s_weight: 0,
            i_ave: 2.0,
            q: 8,
        }
    }

    #[test]
    fn systematic_dense_encoding_counts_redundancy() {
        let c = systematic().cost(TransmissionMode::Systematic, false).unwrap();
        assert_eq!(c.c_enc, 385.0 * 126.0 / 2.0);
        assert_eq!(c.c_dec, c.c_spa);
    }

    #[test]
    fn spa_formula_by_hand() {
        let m = ComplexityModel { n: 10, n_mother: 10, k: 5, d_v: 3.0, i_ave: 1.0, q: 1, ..systematic() };
        // 10 · [1 · (24 + 6 - 11) + 3] = 220
        assert!((m.c_spa() - 220.0).abs() < 1e-9);
    }

    #[test]
    fn mode_preconditions() {
        assert!(systematic().cost(TransmissionMode::Scrambled, false).is_err());
        assert!(systematic().cost(TransmissionMode::Punctured, false).is_err());
    }
}
