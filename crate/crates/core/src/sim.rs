//! Monte Carlo runner for the Bob/Eve pipeline:
//! message → scramble → encode → BPSK/AWGN → decode → descramble → count.
//!
//! Work is split into blocks of `L` frames. Every random draw comes from a
//! counter stream keyed by `(seed, stream, index)`, and blocks are processed
//! in fixed-size batches whose counts are summed, so results do not depend
//! on the number of worker threads.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::curve::{CurvePoint, ErrorRateCurve, Provenance};
use crate::analytic::harq::HarqSpec;
use crate::analytic::unitary::concat_perfect_scrambling;
use crate::channel::{counter_rng, soft_combine, ChannelParams, SoftFrame};
use crate::codes::CodeSpec;
use crate::error::SimError;
use crate::gf2::BitVec;
use crate::scrambler::ScramblerPair;

/// Blocks simulated between two stopping-rule checks.
pub const BATCH: u64 = 1024;

const STREAM_MESSAGE: u64 = 0;
const STREAM_BOB: u64 = 1;
const STREAM_EVE: u64 = 1 << 32;

#[derive(Debug, Clone)]
pub enum Scrambling {
    None,
    /// A real `kL × kL` scrambler pair applied to each block.
    Real(Arc<ScramblerPair>),
    /// No matrix is applied; bit error rates are remapped afterwards by
    /// [`apply_perfect_scrambling`].
    Perfect,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub code: Arc<CodeSpec>,
    pub scrambling: Scrambling,
    /// Frames per scrambling block (`L`).
    pub frames_per_block: usize,
    pub eb_n0_bob_db: f64,
    /// Bob's minus Eve's Eb/N0; `None` leaves Eve out.
    pub sg_db: Option<f64>,
    pub harq: Option<HarqSpec>,
}

impl Scenario {
    pub fn new(code: CodeSpec, eb_n0_bob_db: f64) -> Self {
        Scenario {
            code: Arc::new(code),
            scrambling: Scrambling::None,
            frames_per_block: 1,
            eb_n0_bob_db,
            sg_db: None,
            harq: None,
        }
    }

    pub fn with_scrambling(mut self, scrambling: Scrambling) -> Self {
        if let Scrambling::Real(pair) = &scrambling {
            self.frames_per_block = pair.spec.frames;
        }
        self.scrambling = scrambling;
        self
    }

    pub fn with_frames(mut self, frames: usize) -> Self {
        self.frames_per_block = frames;
        self
    }

    pub fn with_eve(mut self, sg_db: f64) -> Self {
        self.sg_db = Some(sg_db);
        self
    }

    pub fn with_harq(mut self, harq: HarqSpec) -> Self {
        self.sg_db = Some(harq.sg_db);
        self.harq = Some(harq);
        self
    }

    pub fn at(&self, eb_n0_bob_db: f64) -> Self {
        Scenario {
            eb_n0_bob_db,
            ..self.clone()
        }
    }

    pub fn eb_n0_eve_db(&self) -> Option<f64> {
        self.sg_db.map(|g| self.eb_n0_bob_db - g)
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.frames_per_block == 0 {
            return Err(SimError::InvalidScenario("L must be at least 1".into()));
        }
        if let Scrambling::Real(pair) = &self.scrambling {
            let want = self.code.k() * self.frames_per_block;
            if pair.size() != want {
                return Err(SimError::InvalidScenario(format!(
                    "scrambler size {} differs from k·L = {want}",
                    pair.size()
                )));
            }
        }
        if let Some(h) = &self.harq {
            if h.q_max == 0 {
                return Err(SimError::InvalidScenario("q_max must be at least 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopOn {
    Bob,
    Eve,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    /// Frame errors required before stopping.
    pub min_errors: u64,
    /// Frame budget; reaching it first flags the point as low confidence.
    pub max_frames: u64,
    /// Frames always simulated, whatever the error count.
    pub min_frames: u64,
    pub on: StopOn,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_errors: 100,
            max_frames: 100_000_000,
            min_frames: 0,
            on: StopOn::Bob,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PartyStats {
    /// Bit errors after descrambling.
    pub bit_errors: u64,
    /// Bit errors of the decoded (still scrambled) messages.
    pub raw_bit_errors: u64,
    pub frame_errors: u64,
    /// Frames accepted by the integrity check but wrong.
    pub undetected: u64,
    /// SPA iterations of first-transmission decodes.
    pub iterations: u64,
}

impl PartyStats {
    fn merge(&mut self, o: &PartyStats) {
        self.bit_errors += o.bit_errors;
        self.raw_bit_errors += o.raw_bit_errors;
        self.frame_errors += o.frame_errors;
        self.undetected += o.undetected;
        self.iterations += o.iterations;
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrialStats {
    pub eb_n0_bob_db: f64,
    pub frames: u64,
    /// Information bits per party.
    pub bits: u64,
    pub bob: PartyStats,
    pub eve: Option<PartyStats>,
    /// `retransmissions[q - 1]` counts frames that used `q` transmissions.
    pub retransmissions: Vec<u64>,
    pub low_confidence: bool,
}

impl TrialStats {
    fn empty(s: &Scenario) -> Self {
        TrialStats {
            eb_n0_bob_db: s.eb_n0_bob_db,
            eve: s.sg_db.map(|_| PartyStats::default()),
            retransmissions: vec![0; s.harq.map_or(1, |h| h.q_max)],
            ..Default::default()
        }
    }

    fn merge(&mut self, o: &TrialStats) {
        self.frames += o.frames;
        self.bits += o.bits;
        self.bob.merge(&o.bob);
        if let (Some(a), Some(b)) = (&mut self.eve, &o.eve) {
            a.merge(b);
        }
        for (a, b) in self.retransmissions.iter_mut().zip(&o.retransmissions) {
            *a += b;
        }
    }

    fn party(&self, eve: bool) -> Option<&PartyStats> {
        if eve {
            self.eve.as_ref()
        } else {
            Some(&self.bob)
        }
    }

    pub fn pe(&self, eve: bool) -> Option<f64> {
        self.party(eve).map(|p| ratio(p.bit_errors, self.bits))
    }

    pub fn pf(&self, eve: bool) -> Option<f64> {
        self.party(eve).map(|p| ratio(p.frame_errors, self.frames))
    }

    /// Binomial standard error of the frame error rate.
    pub fn pf_std_error(&self, eve: bool) -> Option<f64> {
        self.pf(eve).map(|p| (p * (1.0 - p) / self.frames.max(1) as f64).sqrt())
    }

    /// Average SPA iterations per first-transmission decode.
    pub fn i_ave(&self, eve: bool) -> Option<f64> {
        self.party(eve).map(|p| ratio(p.iterations, self.frames))
    }

    pub fn point(&self, eve: bool) -> Option<CurvePoint> {
        self.point_with(eve, |p| p.bit_errors)
    }

    /// Curve point counting bit errors before descrambling.
    pub fn raw_point(&self, eve: bool) -> Option<CurvePoint> {
        self.point_with(eve, |p| p.raw_bit_errors)
    }

    fn point_with(&self, eve: bool, bits: impl Fn(&PartyStats) -> u64) -> Option<CurvePoint> {
        let p = self.party(eve)?;
        Some(CurvePoint {
            ebn0_db: self.eb_n0_bob_db,
            pe: ratio(bits(p), self.bits),
            pf: ratio(p.frame_errors, self.frames),
            provenance: Provenance::Simulated,
            trials: Some(self.frames),
            errors: Some(p.frame_errors),
        })
    }

    fn done(&self, rule: &StopRule) -> bool {
        let enough = |p: Option<&PartyStats>| p.is_none_or(|p| p.frame_errors >= rule.min_errors);
        let errors_ok = match rule.on {
            StopOn::Bob => enough(Some(&self.bob)),
            StopOn::Eve => enough(self.eve.as_ref()),
            StopOn::Both => enough(Some(&self.bob)) && enough(self.eve.as_ref()),
        };
        self.frames >= rule.min_frames && errors_ok
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

struct Outcome {
    message: BitVec,
    success: bool,
    iterations: usize,
}

/// One receiver's decode of one frame after `copies` combined transmissions.
fn receive(
    code: &CodeSpec,
    params: &ChannelParams,
    codeword: &BitVec,
    frames: &mut Vec<SoftFrame>,
    stream: u64,
    index: u64,
) -> Result<Outcome, SimError> {
    let attempt = frames.len() as u64;
    frames.push(params.transmit(codeword, stream + attempt, index));
    let combined = if frames.len() == 1 {
        frames[0].clone()
    } else {
        soft_combine(frames)?
    };
    let out = code.decode(&params.llr(&combined))?;
    Ok(Outcome {
        message: out.message,
        success: out.success,
        iterations: out.iterations,
    })
}

fn simulate_block(s: &Scenario, seed: u64, block: u64) -> Result<TrialStats, SimError> {
    let code = &*s.code;
    let (k, l) = (code.k(), s.frames_per_block);
    let rate = code.rate();
    let bob_ch = ChannelParams::new(s.eb_n0_bob_db, rate, seed)?;
    let eve_ch = s.eb_n0_eve_db().map(|db| ChannelParams::new(db, rate, seed)).transpose()?;
    let q_max = s.harq.map_or(1, |h| h.q_max);

    let mut rng = counter_rng(seed, STREAM_MESSAGE, block);
    let message = BitVec::random(k * l, &mut rng);
    let sent = match &s.scrambling {
        Scrambling::Real(pair) => pair.scramble(&message)?,
        _ => message.clone(),
    };

    let mut stats = TrialStats::empty(s);
    let mut bob_est = BitVec::zeros(k * l);
    let mut eve_est = BitVec::zeros(k * l);
    for f in 0..l {
        let index = block * l as u64 + f as u64;
        let part = sent.slice(f * k, k);
        let codeword = code.encode(&part)?;

        let mut frames = Vec::with_capacity(q_max);
        let mut bob = receive(code, &bob_ch, &codeword, &mut frames, STREAM_BOB, index)?;
        stats.bob.iterations += bob.iterations as u64;
        while !bob.success && frames.len() < q_max {
            bob = receive(code, &bob_ch, &codeword, &mut frames, STREAM_BOB, index)?;
        }
        let used = frames.len();
        stats.retransmissions[used - 1] += 1;
        if bob.message != part {
            stats.bob.frame_errors += 1;
            if bob.success {
                stats.bob.undetected += 1;
            }
        }
        bob_est.write_at(f * k, &bob.message);

        if let (Some(ch), Some(es)) = (&eve_ch, stats.eve.as_mut()) {
            // Eve sees exactly the transmissions Bob triggered and keeps her
            // first estimate that passes the integrity check
            let mut frames = Vec::with_capacity(used);
            let mut eve = receive(code, ch, &codeword, &mut frames, STREAM_EVE, index)?;
            es.iterations += eve.iterations as u64;
            while !eve.success && frames.len() < used {
                eve = receive(code, ch, &codeword, &mut frames, STREAM_EVE, index)?;
            }
            if eve.message != part {
                es.frame_errors += 1;
                if eve.success {
                    es.undetected += 1;
                }
            }
            eve_est.write_at(f * k, &eve.message);
        }
    }

    let recover = |est: &BitVec| -> Result<BitVec, SimError> {
        Ok(match &s.scrambling {
            Scrambling::Real(pair) if *est != sent => pair.descramble(est)?,
            Scrambling::Real(_) => message.clone(),
            _ => est.clone(),
        })
    };
    stats.bob.bit_errors = recover(&bob_est)?.hamming_distance(&message) as u64;
    stats.bob.raw_bit_errors = bob_est.hamming_distance(&sent) as u64;
    if let Some(es) = stats.eve.as_mut() {
        es.bit_errors = recover(&eve_est)?.hamming_distance(&message) as u64;
        es.raw_bit_errors = eve_est.hamming_distance(&sent) as u64;
    }
    stats.frames = l as u64;
    stats.bits = (k * l) as u64;
    Ok(stats)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, SimError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::ThreadPool(e.to_string()))
}

/// Simulates blocks until the stopping rule is met. `workers = 0` uses
/// rayon's default thread count.
pub fn run_point(s: &Scenario, stop: &StopRule, seed: u64, workers: usize) -> Result<TrialStats, SimError> {
    s.validate()?;
    let pool = pool(workers)?;
    let frames_per_block = s.frames_per_block as u64;
    let mut total = TrialStats::empty(s);
    let mut next = 0u64;
    while !total.done(stop) && total.frames < stop.max_frames {
        let remaining = (stop.max_frames - total.frames).div_ceil(frames_per_block);
        let count = BATCH.min(remaining);
        let batch = pool.install(|| {
            (next..next + count)
                .into_par_iter()
                .map(|b| simulate_block(s, seed, b))
                .try_reduce(
                    || TrialStats::empty(s),
                    |mut a, b| {
                        a.merge(&b);
                        Ok(a)
                    },
                )
        })?;
        total.merge(&batch);
        next += count;
    }
    total.low_confidence = !total.done(stop);
    Ok(total)
}

/// Simulated Bob and (when present) Eve curves over `grid`, indexed by
/// Bob's Eb/N0.
#[derive(Debug, Clone)]
pub struct SimCurves {
    pub bob: ErrorRateCurve,
    pub eve: Option<ErrorRateCurve>,
    pub stats: Vec<TrialStats>,
}

impl SimCurves {
    pub fn any_low_confidence(&self) -> bool {
        self.stats.iter().any(|s| s.low_confidence)
    }

    /// Curve from bit errors counted before descrambling.
    pub fn raw(&self, eve: bool) -> ErrorRateCurve {
        ErrorRateCurve::new(self.stats.iter().filter_map(|t| t.raw_point(eve)).collect())
            .expect("grid already validated")
    }
}

pub fn run_curve(
    s: &Scenario,
    grid: &[f64],
    stop: &StopRule,
    seed: u64,
    workers: usize,
) -> Result<SimCurves, SimError> {
    let stats = grid
        .iter()
        .map(|&db| run_point(&s.at(db), stop, seed, workers))
        .collect::<Result<Vec<_>, _>>()?;
    let curve = |eve: bool| {
        ErrorRateCurve::new(stats.iter().filter_map(|t| t.point(eve)).collect())
            .map_err(|e| SimError::InvalidScenario(e.to_string()))
    };
    Ok(SimCurves {
        bob: curve(false)?,
        eve: if s.sg_db.is_some() { Some(curve(true)?) } else { None },
        stats,
    })
}

/// Bob and Eve curves under soft-combining HARQ.
pub fn run_harq(
    s: &Scenario,
    grid: &[f64],
    stop: &StopRule,
    seed: u64,
    workers: usize,
) -> Result<SimCurves, SimError> {
    if s.harq.is_none() {
        return Err(SimError::InvalidScenario("HARQ scenario without harq parameters".into()));
    }
    run_curve(s, grid, stop, seed, workers)
}

/// Replaces each bit error probability by the perfect-scrambling value
/// derived from the frame error probability: `Pe = [1 - (1 - Pf)^L] / 2`.
pub fn apply_perfect_scrambling(curve: &ErrorRateCurve, frames: usize) -> ErrorRateCurve {
    let points = curve
        .points()
        .iter()
        .map(|p| CurvePoint {
            pe: concat_perfect_scrambling(p.pf, frames).1,
            provenance: Provenance::ModelAdjusted,
            ..*p
        })
        .collect();
    ErrorRateCurve::new(points).expect("same grid as a valid curve")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::BchCode;
    use crate::scrambler::ScramblerSpec;

    fn bch15() -> CodeSpec {
        CodeSpec::Bch(BchCode::build(4, 7).unwrap())
    }

    fn quick() -> StopRule {
        StopRule {
            min_errors: 50,
            max_frames: 20_000,
            ..Default::default()
        }
    }

    #[test]
    fn noiseless_bob_makes_no_errors() {
        let s = Scenario::new(bch15(), 60.0);
        let t = run_point(&s, &StopRule { max_frames: 3000, ..quick() }, 1, 1).unwrap();
        assert_eq!(t.bob.frame_errors, 0);
        assert_eq!(t.frames, 3000);
        assert!(t.low_confidence);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let s = Scenario::new(bch15(), 3.0).with_eve(2.0);
        let a = run_point(&s, &quick(), 9, 1).unwrap();
        let b = run_point(&s, &quick(), 9, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scrambling_keeps_frame_errors() {
        let pair = ScramblerPair::build(&ScramblerSpec::single(7, 3, 4)).unwrap();
        let plain = Scenario::new(bch15(), 2.0);
        let scr = plain.clone().with_scrambling(Scrambling::Real(Arc::new(pair)));
        let stop = StopRule { min_errors: u64::MAX, max_frames: 4096, ..quick() };
        let a = run_point(&plain, &stop, 5, 0).unwrap();
        let b = run_point(&scr, &stop, 5, 0).unwrap();
        let (pa, pb) = (a.pf(false).unwrap(), b.pf(false).unwrap());
        let se = (2.0 * pa * (1.0 - pa) / 4096.0).sqrt();
        assert!((pa - pb).abs() < 4.0 * se, "{pa} vs {pb}");
        assert!(b.bob.bit_errors >= a.bob.bit_errors);
    }

    #[test]
    fn single_transmission_harq_is_plain() {
        let plain = Scenario::new(bch15(), 2.0).with_eve(1.0);
        let harq = plain.clone().with_harq(HarqSpec { q_max: 1, sg_db: 1.0 });
        let stop = StopRule { min_errors: u64::MAX, max_frames: 2048, ..quick() };
        let a = run_point(&plain, &stop, 2, 0).unwrap();
        let b = run_point(&harq, &stop, 2, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perfect_scrambling_mapping() {
        let c = ErrorRateCurve::new(vec![
            CurvePoint::analytic(0.0, 0.1, 0.0),
            CurvePoint::analytic(1.0, 0.1, 1e-2),
        ])
        .unwrap();
        let one = apply_perfect_scrambling(&c, 1);
        assert_eq!(one.points()[0].pe, 0.0);
        assert!((one.points()[1].pe - 5e-3).abs() < 1e-15);
        let many = apply_perfect_scrambling(&c, 170);
        assert!((many.points()[1].pe - 0.41).abs() < 0.01);
        assert_eq!(many.points()[1].provenance, Provenance::ModelAdjusted);
    }

    #[test]
    fn invalid_scenarios() {
        let pair = ScramblerPair::identity(5, 1);
        let s = Scenario::new(bch15(), 1.0).with_scrambling(Scrambling::Real(Arc::new(pair)));
        assert!(run_point(&s, &quick(), 0, 1).is_err());
        assert!(run_point(&Scenario::new(bch15(), 1.0).with_frames(0), &quick(), 0, 1).is_err());
    }
}
