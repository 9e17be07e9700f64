//! Scenario configuration: flat `key = value` pairs under `[section]` headers.

use std::path::PathBuf;

use serde::Deserialize;

use wiretap_core::analytic::{grid, BoundedDistance, CapacityConvention, ComplexityModel, TransmissionMode};
use wiretap_core::codes::{alist, BchCode, CodeSpec, DegreeProfile, LdpcCode, PuncturedCode};
use wiretap_core::scrambler::{ScramblerPair, ScramblerSpec};
use wiretap_core::sim::{StopOn, StopRule};

use crate::CliError;

pub const CONFIG_HELP: &str = "\
CONFIGURATION (all sections optional unless a command needs them)

[code]
  family = unitary | bch | ldpc | punctured      (required)
  k      = information bits                        (required)
  n      = code length; bch derives it from m; punctured: mother length
  m      = bch field degree (default: from n)
  t      = override the bch correction radius
  dv     = ldpc average variable degree            (default 3.0)
  parity_degree = ldpc parity column degree        (default 3)
  seed   = PEG construction seed                   (default 1)
  alist  = read the ldpc parity-check matrix from an alist file
  max_iterations = SPA iteration cap               (default 50)
  punctured codes drop the k information bits of the mother code

[scrambler]
  mode    = none | perfect | real                  (default none)
  weights = descrambler column weights, e.g. [5, 20, 100]  (default [])
  frames  = concatenation depths L, e.g. [1, 10]   (default [1])
  sparse_weight = build a sparse S of this weight instead
  seed    = scrambler seed                         (default 1)

[channel]
  start, stop, step = Eb/N0 grid in dB             (default 0, 10, 0.25)
  points  = explicit grid, overrides start/stop/step
  sg_db   = Bob minus Eve Eb/N0; simulate Eve too  (default: Bob only)

[harq]
  q_max    = transmissions per frame               (default 3)
  sg_db    = security gaps to evaluate             (default [0.0])
  exact_q2 = also write the exact two-transmission FER (default false)
  simulate = Monte Carlo instead of the recursions (default false)

[gap]
  bob_threshold = 1e-5, eve_threshold = 0.4
  bob_curve, eve_curve = CSV curves to use instead of analytic ones

[equivocation]
  rs = 0.43, sg_db = 4.4, convention = unit-noise | symbol-snr
  bob_db = explicit Bob working points; default: the code's Eb/N0 at
           bob_threshold under perfect scrambling

[complexity]
  n, k, dv, i_ave (required); n_mother (default n); z = 0; w = 0;
  s_weight = 0; q = 8; mode = systematic | scrambled | punctured

[sim]
  seed = 1, min_errors = 100, max_frames = 10000000, min_frames = 0,
  stop_on = bob | eve | both, workers = 0 (all cores)
";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub code: Option<CodeSection>,
    #[serde(default)]
    pub scrambler: ScramblerSection,
    #[serde(default)]
    pub channel: ChannelSection,
    pub harq: Option<HarqSection>,
    #[serde(default)]
    pub gap: GapSection,
    pub equivocation: Option<EquivocationSection>,
    pub complexity: Option<ComplexitySection>,
    #[serde(default)]
    pub sim: SimSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Unitary,
    Bch,
    Ldpc,
    Punctured,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub family: Family,
    pub k: usize,
    pub n: Option<usize>,
    pub m: Option<u32>,
    pub t: Option<usize>,
    pub dv: Option<f64>,
    #[serde(default = "default_parity_degree")]
    pub parity_degree: usize,
    #[serde(default = "one")]
    pub seed: u64,
    pub alist: Option<PathBuf>,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScramblingMode {
    #[default]
    None,
    Perfect,
    Real,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScramblerSection {
    #[serde(default)]
    pub mode: ScramblingMode,
    #[serde(default)]
    pub weights: Vec<usize>,
    #[serde(default = "default_frames")]
    pub frames: Vec<usize>,
    pub sparse_weight: Option<usize>,
    #[serde(default = "one")]
    pub seed: u64,
}

impl Default for ScramblerSection {
    fn default() -> Self {
        ScramblerSection {
            mode: ScramblingMode::None,
            weights: Vec::new(),
            frames: default_frames(),
            sparse_weight: None,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    #[serde(default)]
    pub start: f64,
    #[serde(default = "default_stop")]
    pub stop: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    pub points: Option<Vec<f64>>,
    pub sg_db: Option<f64>,
}

impl Default for ChannelSection {
    fn default() -> Self {
        ChannelSection {
            start: 0.0,
            stop: default_stop(),
            step: default_step(),
            points: None,
            sg_db: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarqSection {
    #[serde(default = "default_q_max")]
    pub q_max: usize,
    #[serde(default = "default_sg_list")]
    pub sg_db: Vec<f64>,
    #[serde(default)]
    pub exact_q2: bool,
    #[serde(default)]
    pub simulate: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapSection {
    #[serde(default = "default_bob_threshold")]
    pub bob_threshold: f64,
    #[serde(default = "default_eve_threshold")]
    pub eve_threshold: f64,
    pub bob_curve: Option<PathBuf>,
    pub eve_curve: Option<PathBuf>,
}

impl Default for GapSection {
    fn default() -> Self {
        GapSection {
            bob_threshold: default_bob_threshold(),
            eve_threshold: default_eve_threshold(),
            bob_curve: None,
            eve_curve: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivocationSection {
    #[serde(default = "default_rs")]
    pub rs: f64,
    #[serde(default = "default_equivocation_sg")]
    pub sg_db: f64,
    #[serde(default)]
    pub convention: CapacityConvention,
    pub bob_db: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexitySection {
    pub n: usize,
    pub n_mother: Option<usize>,
    pub k: usize,
    #[serde(default)]
    pub z: usize,
    pub dv: f64,
    #[serde(default)]
    pub w: usize,
    #[serde(default)]
    pub s_weight: usize,
    pub i_ave: f64,
    #[serde(default = "default_q")]
    pub q: u32,
    pub mode: TransmissionMode,
}

impl ComplexitySection {
    pub fn model(&self) -> ComplexityModel {
        ComplexityModel {
            n: self.n,
            n_mother: self.n_mother.unwrap_or(self.n),
            k: self.k,
            z: self.z,
            d_v: self.dv,
            w: self.w,
            s_weight: self.s_weight,
            i_ave: self.i_ave,
            q: self.q,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "one")]
    pub seed: u64,
    #[serde(default = "default_min_errors")]
    pub min_errors: u64,
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    #[serde(default)]
    pub min_frames: u64,
    #[serde(default = "default_stop_on")]
    pub stop_on: StopOn,
    #[serde(default)]
    pub workers: usize,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            seed: 1,
            min_errors: default_min_errors(),
            max_frames: default_max_frames(),
            min_frames: 0,
            stop_on: default_stop_on(),
            workers: 0,
        }
    }
}

impl SimSection {
    pub fn stop_rule(&self) -> StopRule {
        StopRule {
            min_errors: self.min_errors,
            max_frames: self.max_frames,
            min_frames: self.min_frames,
            on: self.stop_on,
        }
    }
}

fn one() -> u64 {
    1
}
fn default_parity_degree() -> usize {
    3
}
fn default_frames() -> Vec<usize> {
    vec![1]
}
fn default_stop() -> f64 {
    10.0
}
fn default_step() -> f64 {
    0.25
}
fn default_q_max() -> usize {
    3
}
fn default_sg_list() -> Vec<f64> {
    vec![0.0]
}
fn default_bob_threshold() -> f64 {
    1e-5
}
fn default_eve_threshold() -> f64 {
    0.4
}
fn default_rs() -> f64 {
    0.43
}
fn default_equivocation_sg() -> f64 {
    4.4
}
fn default_q() -> u32 {
    8
}
fn default_min_errors() -> u64 {
    100
}
fn default_max_frames() -> u64 {
    10_000_000
}
fn default_stop_on() -> StopOn {
    StopOn::Bob
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim().is_empty() {
            return Err(CliError::Config("configuration is empty".into()));
        }
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let c = &self.channel;
        if c.points.is_none() && !(c.step > 0.0 && c.stop >= c.start) {
            return Err(CliError::Config(format!(
                "[channel] needs step > 0 and stop >= start (start = {}, stop = {}, step = {})",
                c.start, c.stop, c.step
            )));
        }
        if let Some(p) = &c.points {
            if p.is_empty() || p.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(CliError::Config("[channel] points must be non-empty and increasing".into()));
            }
        }
        if self.scrambler.frames.contains(&0) {
            return Err(CliError::Config("[scrambler] frames entries must be at least 1".into()));
        }
        if let Some(code) = &self.code {
            if let Some(&w) = self.scrambler.weights.iter().find(|&&w| w == 0 || w > code.k) {
                return Err(CliError::Config(format!("[scrambler] weight {w} outside 1..={}", code.k)));
            }
        }
        if let Some(h) = &self.harq {
            if h.q_max == 0 {
                return Err(CliError::Config("[harq] q_max must be at least 1".into()));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let c = &self.channel;
        c.points.clone().unwrap_or_else(|| grid(c.start, c.stop, c.step))
    }

    pub fn code(&self) -> Result<&CodeSection, CliError> {
        self.code
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a [code] section".into()))
    }
}

impl CodeSection {
    fn bch(&self) -> Result<BchCode, CliError> {
        let m = match (self.m, self.n) {
            (Some(m), _) => m,
            (None, Some(n)) if (n + 1).is_power_of_two() => (n + 1).trailing_zeros(),
            (None, Some(n)) => return Err(CliError::Config(format!("[code] n = {n} is not 2^m - 1"))),
            (None, None) => return Err(CliError::Config("[code] bch needs m or n".into())),
        };
        let code = BchCode::build(m, self.k).map_err(|e| CliError::Config(format!("[code] {e}")))?;
        if let Some(n) = self.n {
            if n != code.n() {
                return Err(CliError::Config(format!("[code] n = {n} but m = {m} gives {}", code.n())));
            }
        }
        Ok(code)
    }

    fn ldpc(&self) -> Result<LdpcCode, CliError> {
        let code = if let Some(path) = &self.alist {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("[code] alist {}: {e}", path.display())))?;
            let h = alist::parse_alist(&text).map_err(|e| CliError::Config(format!("[code] {e}")))?;
            LdpcCode::from_parity_check(h).map_err(|e| CliError::Config(format!("[code] {e}")))?
        } else {
            let n = self.n.ok_or_else(|| CliError::Config("[code] ldpc needs n".into()))?;
            let profile = DegreeProfile::with_average(n, self.k, self.parity_degree, self.dv.unwrap_or(3.0))
                .map_err(|e| CliError::Config(format!("[code] {e}")))?;
            LdpcCode::peg(n, self.k, &profile, self.seed).map_err(|e| CliError::Config(format!("[code] {e}")))?
        };
        Ok(match self.max_iterations {
            Some(i) => code.with_max_iterations(i),
            None => code,
        })
    }

    pub fn spec(&self) -> Result<CodeSpec, CliError> {
        Ok(match self.family {
            Family::Unitary => CodeSpec::unitary(self.k),
            Family::Bch => CodeSpec::Bch(self.bch()?),
            Family::Ldpc => CodeSpec::Ldpc(self.ldpc()?),
            Family::Punctured => {
                let mother = CodeSpec::Ldpc(self.ldpc()?);
                CodeSpec::Punctured(PuncturedCode::information(mother).map_err(|e| CliError::Config(format!("[code] {e}")))?)
            }
        })
    }

    /// Bounded-distance model of an algebraic code; `None` for LDPC families.
    pub fn bounded(&self) -> Result<Option<BoundedDistance>, CliError> {
        let (n, t) = match self.family {
            Family::Unitary => (self.k, 0),
            Family::Bch => {
                let code = self.bch()?;
                (code.n(), self.t.unwrap_or(code.t()))
            }
            Family::Ldpc | Family::Punctured => return Ok(None),
        };
        BoundedDistance::new(n, self.k, t)
            .map(Some)
            .map_err(|e| CliError::Config(format!("[code] {e}")))
    }
}

impl ScramblerSection {
    pub fn pair(&self, k: usize, frames: usize, weight: usize) -> Result<ScramblerPair, CliError> {
        let spec = ScramblerSpec {
            sparse_weight: self.sparse_weight,
            ..ScramblerSpec::block(k, frames, weight, self.seed)
        };
        ScramblerPair::build(&spec).map_err(|e| CliError::Config(format!("[scrambler] {e}")))
    }
}
