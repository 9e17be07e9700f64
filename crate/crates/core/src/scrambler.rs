//! Single-frame and L-frame block scramblers.
//!
//! The descrambling matrix `S⁻¹` carries the weight structure (it decides how
//! far a residual error spreads); the scrambling matrix `S` is obtained by
//! inversion and has no weight control. A sparse-`S` mode is also available
//! for encoder-complexity studies, where `S⁻¹` ends up dense and unstructured.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ScramblerError;
use crate::gf2::{BitVec, Gf2Matrix, MatrixRole};

/// Rejection-sampling budget for nonsingular constructions.
pub const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScramblerSpec {
    /// Information bits per frame.
    pub k: usize,
    /// Frames scrambled together (`L`).
    pub frames: usize,
    /// Column weight of each `k × k` block of the descrambler.
    pub weight: usize,
    /// When set, `S` itself is sparse with this row/column weight and `S⁻¹`
    /// is whatever inversion gives.
    pub sparse_weight: Option<usize>,
    pub seed: u64,
}

impl ScramblerSpec {
    pub fn single(k: usize, weight: usize, seed: u64) -> Self {
        ScramblerSpec {
            k,
            frames: 1,
            weight,
            sparse_weight: None,
            seed,
        }
    }

    pub fn block(k: usize, frames: usize, weight: usize, seed: u64) -> Self {
        ScramblerSpec {
            k,
            frames,
            weight,
            sparse_weight: None,
            seed,
        }
    }

    pub fn size(&self) -> usize {
        self.k * self.frames
    }

    fn validate(&self) -> Result<(), ScramblerError> {
        if self.k == 0 || self.frames == 0 {
            return Err(ScramblerError::InvalidSpec(format!(
                "k = {} and L = {} must be positive",
                self.k, self.frames
            )));
        }
        let limit = if self.sparse_weight.is_some() { self.size() } else { self.k };
        let w = self.sparse_weight.unwrap_or(self.weight);
        if w == 0 || w > limit {
            return Err(ScramblerError::InvalidSpec(format!("weight {w} outside 1..={limit}")));
        }
        Ok(())
    }
}

/// A scrambling matrix together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct ScramblerPair {
    pub spec: ScramblerSpec,
    forward: Gf2Matrix,
    inverse: Gf2Matrix,
    /// Entries `(row, col)` of the descrambler flipped to make it nonsingular.
    repairs: Vec<(usize, usize)>,
    repair_count: usize,
}

impl ScramblerPair {
    /// Pair of identity matrices of size `k·L`.
    pub fn identity(k: usize, frames: usize) -> Self {
        let n = k * frames;
        ScramblerPair {
            spec: ScramblerSpec::block(k, frames, 1, 0),
            forward: Gf2Matrix::identity(n).with_role(MatrixRole::Scrambler),
            inverse: Gf2Matrix::identity(n).with_role(MatrixRole::InverseScrambler),
            repairs: Vec::new(),
            repair_count: 0,
        }
    }

    /// Builds a pair from `spec`, dispatching on `frames` and the sparse mode.
    pub fn build(spec: &ScramblerSpec) -> Result<Self, ScramblerError> {
        spec.validate()?;
        if spec.sparse_weight.is_some() {
            build_sparse_forward(spec)
        } else if spec.frames == 1 {
            build_single(spec)
        } else {
            build_block(spec)
        }
    }

    /// Assembles a pair from explicit matrices, checking `S · S⁻¹ = I`.
    pub fn from_matrices(
        spec: ScramblerSpec,
        forward: Gf2Matrix,
        inverse: Gf2Matrix,
        repair_count: usize,
    ) -> Result<Self, ScramblerError> {
        let n = spec.size();
        for m in [&forward, &inverse] {
            if m.rows() != n || m.cols() != n {
                return Err(ScramblerError::LengthMismatch {
                    expected: n,
                    found: m.rows(),
                });
            }
        }
        if !forward.mul(&inverse)?.is_identity() {
            return Err(ScramblerError::InvalidSpec("forward · inverse is not the identity".into()));
        }
        Ok(ScramblerPair {
            spec,
            forward: forward.with_role(MatrixRole::Scrambler),
            inverse: inverse.with_role(MatrixRole::InverseScrambler),
            repairs: Vec::new(),
            repair_count,
        })
    }

    pub fn forward(&self) -> &Gf2Matrix {
        &self.forward
    }

    pub fn inverse(&self) -> &Gf2Matrix {
        &self.inverse
    }

    pub fn size(&self) -> usize {
        self.forward.rows()
    }

    pub fn repairs(&self) -> &[(usize, usize)] {
        &self.repairs
    }

    pub fn repair_count(&self) -> usize {
        self.repair_count
    }

    pub fn inverse_column_weights(&self) -> Vec<usize> {
        self.inverse.col_weights()
    }

    /// `ū′ = ū · S̄`.
    pub fn scramble(&self, frames: &BitVec) -> Result<BitVec, ScramblerError> {
        self.check_len(frames)?;
        Ok(self.forward.mat_vec(frames)?)
    }

    /// `ū = ū′ · S̄⁻¹`; residual errors `e` come out as `e · S̄⁻¹`.
    pub fn descramble(&self, frames: &BitVec) -> Result<BitVec, ScramblerError> {
        self.check_len(frames)?;
        Ok(self.inverse.mat_vec(frames)?)
    }

    fn check_len(&self, v: &BitVec) -> Result<(), ScramblerError> {
        if v.len() != self.size() {
            return Err(ScramblerError::LengthMismatch {
                expected: self.size(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Mean fraction of descrambler output bits that flip when a single,
    /// uniformly chosen input bit flips.
    pub fn avalanche_statistic(&self, trials: usize, seed: u64) -> f64 {
        assert!(trials > 0, "avalanche needs at least one trial");
        let n = self.size();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut flipped = 0usize;
        for _ in 0..trials {
            let x = BitVec::random(n, &mut rng);
            let mut y = x.clone();
            y.flip(rng.random_range(0..n));
            let a = self.inverse.mat_vec(&x).expect("length checked");
            let b = self.inverse.mat_vec(&y).expect("length checked");
            flipped += a.hamming_distance(&b);
        }
        flipped as f64 / (trials as f64 * n as f64)
    }

    /// Text form: a `k L w seed repair-count` line, then the hex dumps of
    /// `S` and `S⁻¹`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {} {}\n",
            self.spec.k, self.spec.frames, self.spec.weight, self.spec.seed, self.repair_count
        );
        out.push_str(&self.forward.to_hex());
        out.push_str(&self.inverse.to_hex());
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ScramblerError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| ScramblerError::InvalidSpec("empty scrambler file".into()))?;
        let fields: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|e| ScramblerError::InvalidSpec(format!("bad header {header:?}: {e}")))?;
        let [k, frames, weight, seed, repairs] = fields[..] else {
            return Err(ScramblerError::InvalidSpec(format!(
                "expected `k L w seed repair-count`, got {header:?}"
            )));
        };
        let spec = ScramblerSpec::block(k as usize, frames as usize, weight as usize, seed);
        let forward = Gf2Matrix::from_hex_lines(&mut lines)?;
        let inverse = Gf2Matrix::from_hex_lines(&mut lines)?;
        Self::from_matrices(spec, forward, inverse, repairs as usize)
    }
}

fn attempt_rng(seed: u64, attempt: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt as u64);
    rng
}

/// Single-frame pair whose descrambler has regular column weight `w`.
///
/// Odd `w` is rejection-sampled until nonsingular. With even `w` every column
/// has even parity, so the rows always sum to zero and the matrix is singular;
/// those draws go straight to the minimal repair.
pub fn build_single(spec: &ScramblerSpec) -> Result<ScramblerPair, ScramblerError> {
    spec.validate()?;
    if spec.frames != 1 {
        return Err(ScramblerError::InvalidSpec(format!(
            "single-frame build with L = {}",
            spec.frames
        )));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = attempt_rng(spec.seed, attempt);
        let mut inv = Gf2Matrix::zeros(spec.k, spec.k);
        for (r, c) in regular_block(spec.k, spec.weight, &mut rng) {
            inv.set(r, c, true);
        }
        let repairs = if spec.weight.is_multiple_of(2) {
            repair_to_full_rank(&mut inv, spec.k)
        } else {
            Vec::new()
        };
        if let Some(fwd) = inv.invert()? {
            return Ok(finish(spec, fwd, inv, repairs));
        }
    }
    Err(ScramblerError::Construction {
        attempts: MAX_ATTEMPTS,
    })
}

/// `kL × kL` descrambler made of `L × L` blocks, each `k × k` with row and
/// column weight `w`, followed by the minimal block-diagonal repair.
pub fn build_block(spec: &ScramblerSpec) -> Result<ScramblerPair, ScramblerError> {
    spec.validate()?;
    if spec.frames == 1 {
        return build_single(spec);
    }
    let (k, l, w) = (spec.k, spec.frames, spec.weight);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = attempt_rng(spec.seed, attempt);
        let mut inv = Gf2Matrix::zeros(k * l, k * l);
        for bi in 0..l {
            for bj in 0..l {
                for (r, c) in regular_block(k, w, &mut rng) {
                    inv.set(bi * k + r, bj * k + c, true);
                }
            }
        }
        let repairs = repair_to_full_rank(&mut inv, k);
        if let Some(fwd) = inv.invert()? {
            return Ok(finish(spec, fwd, inv, repairs));
        }
    }
    Err(ScramblerError::Construction {
        attempts: MAX_ATTEMPTS,
    })
}

/// Sparse `S` with row/column weight `sparse_weight`; `S⁻¹` is left dense.
pub fn build_sparse_forward(spec: &ScramblerSpec) -> Result<ScramblerPair, ScramblerError> {
    spec.validate()?;
    let weight = spec.sparse_weight.ok_or_else(|| {
        ScramblerError::InvalidSpec("sparse-forward build needs sparse_weight".into())
    })?;
    let n = spec.size();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = attempt_rng(spec.seed, attempt);
        let mut fwd = Gf2Matrix::zeros(n, n);
        for (r, c) in regular_block(n, weight, &mut rng) {
            fwd.set(r, c, true);
        }
        if let Some(inv) = fwd.invert()? {
            return Ok(finish(spec, fwd, inv, Vec::new()));
        }
    }
    Err(ScramblerError::Construction {
        attempts: MAX_ATTEMPTS,
    })
}

fn finish(
    spec: &ScramblerSpec,
    forward: Gf2Matrix,
    inverse: Gf2Matrix,
    repairs: Vec<(usize, usize)>,
) -> ScramblerPair {
    ScramblerPair {
        spec: *spec,
        forward: forward.with_role(MatrixRole::Scrambler),
        inverse: inverse.with_role(MatrixRole::InverseScrambler),
        repair_count: repairs.len(),
        repairs,
    }
}

/// Entries of a random `size × size` matrix with row and column weight `w`:
/// a sum of `w` distinct cyclic shifts, with rows and columns permuted.
fn regular_block(size: usize, w: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let offsets = sample(rng, size, w).into_vec();
    let mut row_perm: Vec<usize> = (0..size).collect();
    let mut col_perm: Vec<usize> = (0..size).collect();
    row_perm.shuffle(rng);
    col_perm.shuffle(rng);
    let mut out = Vec::with_capacity(size * w);
    for i in 0..size {
        for &s in &offsets {
            out.push((row_perm[i], col_perm[(i + s) % size]));
        }
    }
    out
}

/// Flips the fewest entries needed to make `m` nonsingular.
///
/// Columns are scanned left to right against an incrementally reduced basis
/// of the columns already seen. A column that falls in that span gets one
/// entry flipped, preferring its diagonal position and then rows of its own
/// diagonal block (blocks are `block × block`). Each flip raises the rank by
/// one, so the number of flips equals the initial rank deficiency.
pub fn repair_to_full_rank(m: &mut Gf2Matrix, block: usize) -> Vec<(usize, usize)> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let cols = m.transpose().to_dense();
    let mut basis: Vec<(usize, BitVec)> = Vec::with_capacity(n);
    let reduce = |basis: &[(usize, BitVec)], mut v: BitVec| {
        for (p, b) in basis {
            if v.get(*p) {
                v.xor_assign(b);
            }
        }
        v
    };
    let mut repairs = Vec::new();
    for c in 0..n {
        let v = reduce(&basis, cols.row(c));
        let lead = v.iter_ones().next();
        if let Some(p) = lead {
            basis.push((p, v));
            continue;
        }
        let b0 = (c / block) * block;
        let b1 = (b0 + block).min(n);
        let in_block = (c..b1).chain(b0..c);
        let fallback = (0..b0).chain(b1..n);
        for r in in_block.chain(fallback) {
            let e = reduce(&basis, BitVec::unit(n, r));
            let lead = e.iter_ones().next();
            if let Some(p) = lead {
                m.flip(r, c);
                repairs.push((r, c));
                basis.push((p, e));
                break;
            }
        }
    }
    repairs
}
