//! Channel codes sharing one encode/decode contract.

pub mod alist;
pub mod bch;
pub mod ldpc;
pub mod puncture;

use serde::{Deserialize, Serialize};

use crate::error::CodeError;
use crate::gf2::BitVec;

pub use bch::BchCode;
pub use ldpc::{DegreeProfile, LdpcCode};
pub use puncture::PuncturedCode;

/// Result of one decoding attempt. Failure is an outcome, not an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Estimate of the `k` information bits.
    pub message: BitVec,
    /// Estimate of the full (mother) codeword.
    pub codeword: BitVec,
    /// Decoder-side integrity check: valid BCH locator or zero LDPC syndrome.
    pub success: bool,
    /// SPA iterations used (0 for algebraic decoders).
    pub iterations: usize,
    /// Number of bits flipped by a BCH decoder.
    pub corrected: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeFamily {
    Unitary,
    Bch,
    Ldpc,
}

/// Rate-one "code" with `G = I`: no redundancy and no integrity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitaryCode {
    k: usize,
}

impl UnitaryCode {
    pub fn new(k: usize) -> Self {
        assert!(k > 0, "unitary code needs k >= 1");
        UnitaryCode { k }
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

#[derive(Debug, Clone)]
pub enum CodeSpec {
    Unitary(UnitaryCode),
    Bch(BchCode),
    Ldpc(LdpcCode),
    Punctured(PuncturedCode),
}

impl CodeSpec {
    pub fn unitary(k: usize) -> Self {
        CodeSpec::Unitary(UnitaryCode::new(k))
    }

    pub fn family(&self) -> CodeFamily {
        match self {
            CodeSpec::Unitary(_) => CodeFamily::Unitary,
            CodeSpec::Bch(_) => CodeFamily::Bch,
            CodeSpec::Ldpc(_) => CodeFamily::Ldpc,
            CodeSpec::Punctured(p) => p.mother().family(),
        }
    }

    /// Transmitted length.
    pub fn n(&self) -> usize {
        match self {
            CodeSpec::Unitary(u) => u.k,
            CodeSpec::Bch(c) => c.n(),
            CodeSpec::Ldpc(c) => c.n(),
            CodeSpec::Punctured(p) => p.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            CodeSpec::Unitary(u) => u.k,
            CodeSpec::Bch(c) => c.k(),
            CodeSpec::Ldpc(c) => c.k(),
            CodeSpec::Punctured(p) => p.k(),
        }
    }

    /// Guaranteed correction radius (BCH only).
    pub fn t(&self) -> Option<usize> {
        match self {
            CodeSpec::Bch(c) => Some(c.t()),
            CodeSpec::Unitary(_) => Some(0),
            _ => None,
        }
    }

    /// `R = k / n` with `n` the transmitted length.
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    /// Encodes `u` into the transmitted word.
    pub fn encode(&self, u: &BitVec) -> Result<BitVec, CodeError> {
        match self {
            CodeSpec::Unitary(c) => {
                if u.len() != c.k {
                    return Err(CodeError::LengthMismatch {
                        expected: c.k,
                        found: u.len(),
                    });
                }
                Ok(u.clone())
            }
            CodeSpec::Bch(c) => c.encode(u),
            CodeSpec::Ldpc(c) => c.encode(u),
            CodeSpec::Punctured(p) => p.encode(u),
        }
    }

    /// Decodes channel LLRs (positive favours bit 0) of the transmitted word.
    pub fn decode(&self, llr: &[f64]) -> Result<DecodeOutcome, CodeError> {
        match self {
            CodeSpec::Unitary(c) => {
                if llr.len() != c.k {
                    return Err(CodeError::LengthMismatch {
                        expected: c.k,
                        found: llr.len(),
                    });
                }
                let hard = hard_decision(llr);
                Ok(DecodeOutcome {
                    message: hard.clone(),
                    codeword: hard,
                    success: true,
                    iterations: 0,
                    corrected: 0,
                })
            }
            CodeSpec::Bch(c) => {
                if llr.len() != c.n() {
                    return Err(CodeError::LengthMismatch {
                        expected: c.n(),
                        found: llr.len(),
                    });
                }
                c.decode(&hard_decision(llr))
            }
            CodeSpec::Ldpc(c) => c.decode(llr),
            CodeSpec::Punctured(p) => p.decode(llr),
        }
    }
}

/// Sign slicing: negative LLR → 1.
pub fn hard_decision(llr: &[f64]) -> BitVec {
    let mut out = BitVec::zeros(llr.len());
    for (i, &l) in llr.iter().enumerate() {
        if l < 0.0 {
            out.set(i, true);
        }
    }
    out
}
