//! BPSK over AWGN with rate-aware noise, LLRs and soft combining.
//!
//! Symbols are `1 - 2c` with unit energy and the noise variance is
//! `σ² = 1 / (2·R·Eb/N0)`. Noise streams are counter based: a
//! `(seed, stream, frame)` triple fixes every sample, whatever thread
//! draws it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::ChannelError;
use crate::gf2::BitVec;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub eb_n0_db: f64,
    pub rate: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(eb_n0_db: f64, rate: f64, seed: u64) -> Result<Self, ChannelError> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(ChannelError::InvalidParams(format!("rate {rate} outside (0, 1]")));
        }
        if !eb_n0_db.is_finite() && eb_n0_db != f64::INFINITY {
            return Err(ChannelError::InvalidParams(format!("Eb/N0 {eb_n0_db} dB")));
        }
        Ok(ChannelParams { eb_n0_db, rate, seed })
    }

    pub fn sigma2(&self) -> f64 {
        1.0 / (2.0 * self.rate * db_to_linear(self.eb_n0_db))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2().sqrt()
    }

    /// Modulates `c` and adds noise drawn from `rng`.
    pub fn transmit_with<R: Rng + ?Sized>(&self, c: &BitVec, rng: &mut R) -> SoftFrame {
        let sigma = self.sigma();
        let samples = (0..c.len())
            .map(|i| {
                let s = if c.get(i) { -1.0 } else { 1.0 };
                let z: f64 = rng.sample(StandardNormal);
                s + sigma * z
            })
            .collect();
        SoftFrame { samples, q: 1 }
    }

    /// Noise from the counter stream `(self.seed, stream, frame)`.
    pub fn transmit(&self, c: &BitVec, stream: u64, frame: u64) -> SoftFrame {
        let mut rng = counter_rng(self.seed, stream, frame);
        self.transmit_with(c, &mut rng)
    }

    /// `2·Q·y/σ²`: the LLR of an average of `Q` observations.
    pub fn llr(&self, frame: &SoftFrame) -> Vec<f64> {
        let scale = 2.0 * frame.q as f64 / self.sigma2();
        frame.samples.iter().map(|&y| scale * y).collect()
    }
}

/// Received samples, possibly the average of `q` transmissions.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftFrame {
    pub samples: Vec<f64>,
    pub q: usize,
}

impl SoftFrame {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn hard(&self) -> BitVec {
        let mut out = BitVec::zeros(self.samples.len());
        for (i, &y) in self.samples.iter().enumerate() {
            if y < 0.0 {
                out.set(i, true);
            }
        }
        out
    }
}

/// Count-weighted element-wise mean of frames carrying the same codeword.
pub fn soft_combine(frames: &[SoftFrame]) -> Result<SoftFrame, ChannelError> {
    let first = frames.first().ok_or(ChannelError::Empty)?;
    let len = first.len();
    let mut acc = vec![0.0; len];
    let mut q = 0;
    for f in frames {
        if f.len() != len {
            return Err(ChannelError::LengthMismatch {
                expected: len,
                found: f.len(),
            });
        }
        for (a, &y) in acc.iter_mut().zip(&f.samples) {
            *a += f.q as f64 * y;
        }
        q += f.q;
    }
    for a in &mut acc {
        *a /= q as f64;
    }
    Ok(SoftFrame { samples: acc, q })
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent generator for `(seed, stream, frame)`: the key mixes seed and
/// stream, the ChaCha stream id is the frame index.
pub fn counter_rng(seed: u64, stream: u64, frame: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let a = splitmix(seed);
    let b = splitmix(a ^ stream.wrapping_mul(0xd6e8_feb8_6659_fd93));
    let c = splitmix(b);
    let d = splitmix(c ^ 0x5851_f42d_4c95_7f2d);
    for (chunk, word) in key.chunks_exact_mut(8).zip([a, b, c, d]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(frame);
    rng
}
