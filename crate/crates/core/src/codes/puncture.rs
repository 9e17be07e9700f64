use crate::codes::{CodeSpec, DecodeOutcome};
use crate::error::CodeError;
use crate::gf2::BitVec;

/// A mother code whose punctured positions are never transmitted.
#[derive(Debug, Clone)]
pub struct PuncturedCode {
    mother: Box<CodeSpec>,
    punctured: Vec<usize>,
    kept: Vec<usize>,
}

impl PuncturedCode {
    pub fn new(mother: CodeSpec, positions: &[usize]) -> Result<Self, CodeError> {
        let n_mother = mother.n();
        let mut punctured = positions.to_vec();
        punctured.sort_unstable();
        if let Some(&p) = punctured.iter().find(|&&p| p >= n_mother) {
            return Err(CodeError::InvalidPuncturing(format!(
                "position {p} outside mother length {n_mother}"
            )));
        }
        if punctured.windows(2).any(|w| w[0] == w[1]) {
            return Err(CodeError::InvalidPuncturing("repeated position".into()));
        }
        if punctured.len() == n_mother {
            return Err(CodeError::InvalidPuncturing("every position punctured".into()));
        }
        let mut mask = vec![false; n_mother];
        for &p in &punctured {
            mask[p] = true;
        }
        let kept = (0..n_mother).filter(|&i| !mask[i]).collect();
        Ok(PuncturedCode {
            mother: Box::new(mother),
            punctured,
            kept,
        })
    }

    /// Punctures the `k` systematic information positions of the mother code.
    pub fn information(mother: CodeSpec) -> Result<Self, CodeError> {
        let k = mother.k();
        Self::new(mother, &(0..k).collect::<Vec<_>>())
    }

    pub fn mother(&self) -> &CodeSpec {
        &self.mother
    }

    pub fn punctured(&self) -> &[usize] {
        &self.punctured
    }

    /// Transmitted length `n' - z`.
    pub fn n(&self) -> usize {
        self.kept.len()
    }

    pub fn mother_n(&self) -> usize {
        self.mother.n()
    }

    pub fn k(&self) -> usize {
        self.mother.k()
    }

    pub fn encode(&self, u: &BitVec) -> Result<BitVec, CodeError> {
        let full = self.mother.encode(u)?;
        let mut out = BitVec::zeros(self.kept.len());
        for (i, &p) in self.kept.iter().enumerate() {
            if full.get(p) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Decodes with zero LLRs in the punctured positions.
    pub fn decode(&self, llr: &[f64]) -> Result<DecodeOutcome, CodeError> {
        if llr.len() != self.kept.len() {
            return Err(CodeError::LengthMismatch {
                expected: self.kept.len(),
                found: llr.len(),
            });
        }
        let mut full = vec![0.0; self.mother.n()];
        for (&p, &l) in self.kept.iter().zip(llr) {
            full[p] = l;
        }
        self.mother.decode(&full)
    }
}
