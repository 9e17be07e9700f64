use std::sync::Arc;

use serde::Serialize;

use wiretap_core::analytic::special::waterline;
use wiretap_core::analytic::{
    concat_perfect_scrambling, concat_real_scrambling, equivocation as equivocation_point, harq_fer_approx,
    harq_fer_exact_q2, harq_system_fer, BoundedDistance, ComplexityCost, CurvePoint, ErrorRateCurve,
    EquivocationPoint, HarqSpec, OddSelection, SecurityGapQuery,
};
use wiretap_core::sim::{apply_perfect_scrambling, run_curve, run_harq, Scenario, Scrambling, SimCurves};

use crate::config::{Config, EquivocationSection, ScramblingMode};
use crate::output::OutputDir;
use crate::{CliError, Outcome};

fn run_err(e: impl std::fmt::Display) -> CliError {
    CliError::Run(e.to_string())
}

fn bounded_or(cfg: &Config, what: &str) -> Result<BoundedDistance, CliError> {
    cfg.code()?.bounded()?.ok_or_else(|| {
        CliError::Config(format!("{what} has closed forms for unitary and bch codes only; use `simulate` for LDPC"))
    })
}

/// Analytic curves of a bounded-distance code, keyed by output file stem.
fn analytic_curves(cfg: &Config, code: &BoundedDistance) -> Result<Vec<(String, ErrorRateCurve)>, CliError> {
    let grid = cfg.grid();
    let rates: Vec<_> = grid.iter().map(|&x| code.rates(x)).collect();
    let build = |f: &dyn Fn(usize) -> (f64, f64)| {
        ErrorRateCurve::new(
            grid.iter()
                .enumerate()
                .map(|(i, &x)| {
                    let (pe, pf) = f(i);
                    CurvePoint::analytic(x, pe, pf)
                })
                .collect(),
        )
        .map_err(run_err)
    };
    let mut out = vec![
        ("unscrambled".to_string(), build(&|i| (rates[i].pe, rates[i].pf))?),
        ("perfect".to_string(), build(&|i| (0.5 * rates[i].pf, rates[i].pf))?),
    ];
    let mut scrambled = Vec::new();
    for &w in &cfg.scrambler.weights {
        let sel = OddSelection::new(code.k(), w);
        let pe = grid
            .iter()
            .map(|&x| code.scrambled_ber(x, &sel))
            .collect::<Result<Vec<_>, _>>()
            .map_err(run_err)?;
        out.push((format!("w{w}"), build(&|i| (pe[i], rates[i].pf))?));
        scrambled.push((w, pe));
    }
    for &l in cfg.scrambler.frames.iter().filter(|&&l| l > 1) {
        out.push((
            format!("perfect_L{l}"),
            build(&|i| {
                let (pf, pe) = concat_perfect_scrambling(rates[i].pf, l);
                (pe, pf)
            })?,
        ));
        for (w, pe) in &scrambled {
            out.push((
                format!("w{w}_L{l}"),
                build(&|i| (concat_real_scrambling(pe[i], l), concat_perfect_scrambling(rates[i].pf, l).0))?,
            ));
        }
    }
    Ok(out)
}

pub fn curve(cfg: &Config, out: &mut OutputDir) -> Result<Outcome, CliError> {
    match cfg.code()?.bounded()? {
        Some(code) => {
            for (name, c) in analytic_curves(cfg, &code)? {
                out.curve(&format!("{name}.csv"), &c)?;
            }
            Ok(Outcome::Done)
        }
        None => simulate(cfg, out),
    }
}

#[derive(Debug, Serialize)]
struct GapRecord {
    technique: String,
    bob_threshold: f64,
    eve_threshold: f64,
    bob_db: Option<f64>,
    eve_db: Option<f64>,
    gap_db: Option<f64>,
    /// Grid samples around Bob's crossing.
    bob_bracket: Option<[f64; 2]>,
    eve_bracket: Option<[f64; 2]>,
    error: Option<String>,
}

fn bracket(c: &ErrorRateCurve, threshold: f64) -> Option<[f64; 2]> {
    c.points()
        .windows(2)
        .find(|w| w[0].pe >= threshold && w[1].pe <= threshold && w[0].pe != w[1].pe)
        .map(|w| [w[0].ebn0_db, w[1].ebn0_db])
}

fn gap_record(name: &str, bob: &ErrorRateCurve, eve: &ErrorRateCurve, q: &SecurityGapQuery) -> GapRecord {
    let b = bob.crossing(q.bob_threshold);
    let e = eve.crossing(q.eve_threshold);
    let error = match (&b, &e) {
        (Err(x), _) => Some(format!("Bob: {x}")),
        (_, Err(x)) => Some(format!("Eve: {x}")),
        _ => None,
    };
    let (b, e) = (b.ok(), e.ok());
    GapRecord {
        technique: name.to_string(),
        bob_threshold: q.bob_threshold,
        eve_threshold: q.eve_threshold,
        bob_db: b,
        eve_db: e,
        gap_db: b.zip(e).map(|(b, e)| b - e),
        bob_bracket: bracket(bob, q.bob_threshold),
        eve_bracket: bracket(eve, q.eve_threshold),
        error,
    }
}

fn read_curve(path: &std::path::Path) -> Result<ErrorRateCurve, CliError> {
    let f = std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ErrorRateCurve::read_csv(f).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn gap(cfg: &Config, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let g = &cfg.gap;
    let q = SecurityGapQuery {
        bob_threshold: g.bob_threshold,
        eve_threshold: g.eve_threshold,
    };
    if !(q.bob_threshold > 0.0 && q.bob_threshold <= q.eve_threshold && q.eve_threshold <= 0.5) {
        return Err(CliError::Config(format!(
            "[gap] thresholds must satisfy 0 < bob <= eve <= 0.5 (got {:e}, {})",
            q.bob_threshold, q.eve_threshold
        )));
    }
    let records = match (&g.bob_curve, &g.eve_curve) {
        (Some(b), Some(e)) => vec![gap_record("curves", &read_curve(b)?, &read_curve(e)?, &q)],
        (None, None) => {
            let code = bounded_or(cfg, "gap without bob_curve/eve_curve")?;
            analytic_curves(cfg, &code)?
                .iter()
                .map(|(name, c)| gap_record(name, c, c, &q))
                .collect()
        }
        _ => return Err(CliError::Config("[gap] bob_curve and eve_curve go together".into())),
    };
    for r in records.iter().filter(|r| r.error.is_some()) {
        eprintln!("{}: {}", r.technique, r.error.as_deref().unwrap_or_default());
    }
    out.json("gap.json", &records)?;
    Ok(Outcome::Done)
}

#[derive(Debug, Serialize)]
struct ExactQ2Row {
    ebn0_db: f64,
    approx: f64,
    exact: f64,
}

fn sg_name(sg: f64) -> String {
    format!("sg{sg}")
}

fn perfect_curve(grid: &[f64], pf: impl Fn(f64) -> f64) -> Result<ErrorRateCurve, CliError> {
    ErrorRateCurve::from_fn(grid, |x| {
        let f = pf(x);
        (0.5 * f, f)
    })
    .map_err(run_err)
}

pub fn harq(cfg: &Config, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let h = cfg
        .harq
        .as_ref()
        .ok_or_else(|| CliError::Config("harq needs a [harq] section".into()))?;
    let grid = cfg.grid();
    if h.simulate {
        let base = Scenario::new(cfg.code()?.spec()?, 0.0);
        let stop = cfg.sim.stop_rule();
        out.simulated(cfg.sim.seed, stop);
        let mut outcome = Outcome::Done;
        for &sg in &h.sg_db {
            let s = base.clone().with_harq(HarqSpec { q_max: h.q_max, sg_db: sg });
            let curves = run_harq(&s, &grid, &stop, cfg.sim.seed, cfg.sim.workers).map_err(run_err)?;
            outcome = write_sim(out, &format!("_{}", sg_name(sg)), &curves, None, outcome)?;
        }
        return Ok(outcome);
    }
    let code = bounded_or(cfg, "harq without simulate = true")?;
    let pf_q = |x: f64, q: usize| harq_fer_approx(|y| code.pf(y), x, q);
    out.curve("plain.csv", &perfect_curve(&grid, |x| code.pf(x))?)?;
    for (i, &sg) in h.sg_db.iter().enumerate() {
        let spec = HarqSpec { q_max: h.q_max, sg_db: sg };
        if i == 0 {
            out.curve("harq_bob.csv", &perfect_curve(&grid, |x| harq_system_fer(&spec, pf_q, x).0)?)?;
        }
        let eve = perfect_curve(&grid, |x| harq_system_fer(&spec, pf_q, x).1)?;
        out.curve(&format!("harq_eve_{}.csv", sg_name(sg)), &eve)?;
    }
    if h.exact_q2 {
        let rows = grid
            .iter()
            .map(|&x| {
                Ok(ExactQ2Row {
                    ebn0_db: x,
                    approx: pf_q(x, 2),
                    exact: harq_fer_exact_q2(&code, x).map_err(run_err)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        out.rows("exact_q2.csv", &rows)?;
    }
    Ok(Outcome::Done)
}

pub fn equivocation(cfg: &Config, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let e = cfg.equivocation.clone().unwrap_or(EquivocationSection {
        rs: 0.43,
        sg_db: 4.4,
        convention: Default::default(),
        bob_db: None,
    });
    let bob = match &e.bob_db {
        Some(v) => v.clone(),
        None => {
            let t = cfg.gap.bob_threshold;
            let db = if let Some(path) = &cfg.gap.bob_curve {
                read_curve(path)?.crossing(t).map_err(run_err)?
            } else {
                let code = bounded_or(cfg, "equivocation without bob_db or a [gap] bob_curve")?;
                waterline(|x| code.perfect_scrambling(x), t, -10.0, 30.0).map_err(run_err)?
            };
            vec![db]
        }
    };
    let points = bob
        .iter()
        .map(|&b| equivocation_point(e.rs, e.sg_db, b, e.convention))
        .collect::<Result<Vec<EquivocationPoint>, _>>()
        .map_err(|x| CliError::Config(format!("[equivocation] {x}")))?;
    out.json("equivocation.json", &points)?;
    Ok(Outcome::Done)
}

#[derive(Debug, Serialize)]
struct CostReport {
    c_enc: f64,
    c_dec: f64,
    c_spa: f64,
    log2_enc: f64,
    log2_dec: f64,
}

impl From<ComplexityCost> for CostReport {
    fn from(c: ComplexityCost) -> Self {
        CostReport {
            c_enc: c.c_enc,
            c_dec: c.c_dec,
            c_spa: c.c_spa,
            log2_enc: c.log2_enc(),
            log2_dec: c.log2_dec(),
        }
    }
}

pub fn complexity(cfg: &Config, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let c = cfg
        .complexity
        .as_ref()
        .ok_or_else(|| CliError::Config("complexity needs a [complexity] section".into()))?;
    let model = c.model();
    let cost = |tri| model.cost(c.mode, tri).map_err(|e| CliError::Config(format!("[complexity] {e}")));
    #[derive(Serialize)]
    struct Report {
        mode: wiretap_core::analytic::TransmissionMode,
        model: wiretap_core::analytic::ComplexityModel,
        dense: CostReport,
        triangular: CostReport,
    }
    out.json(
        "complexity.json",
        &Report {
            mode: c.mode,
            model,
            dense: cost(false)?.into(),
            triangular: cost(true)?.into(),
        },
    )?;
    Ok(Outcome::Done)
}

fn write_sim(
    out: &mut OutputDir,
    suffix: &str,
    curves: &SimCurves,
    perfect_frames: Option<usize>,
    outcome: Outcome,
) -> Result<Outcome, CliError> {
    out.curve(&format!("bob{suffix}.csv"), &curves.bob)?;
    out.curve(&format!("bob_raw{suffix}.csv"), &curves.raw(false))?;
    if let Some(l) = perfect_frames {
        out.curve(&format!("bob_perfect{suffix}.csv"), &apply_perfect_scrambling(&curves.bob, l))?;
    }
    if let Some(eve) = &curves.eve {
        out.curve(&format!("eve{suffix}.csv"), eve)?;
        out.curve(&format!("eve_raw{suffix}.csv"), &curves.raw(true))?;
        if let Some(l) = perfect_frames {
            out.curve(&format!("eve_perfect{suffix}.csv"), &apply_perfect_scrambling(eve, l))?;
        }
    }
    out.json(&format!("stats{suffix}.json"), &curves.stats)?;
    Ok(if curves.any_low_confidence() { Outcome::LowConfidence } else { outcome })
}

fn single<'a>(v: &'a [usize], what: &str) -> Result<&'a usize, CliError> {
    match v {
        [x] => Ok(x),
        _ => Err(CliError::Config(format!("simulate needs exactly one [scrambler] {what} entry"))),
    }
}

pub fn simulate(cfg: &Config, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let code = cfg.code()?.spec()?;
    let k = code.k();
    let sc = &cfg.scrambler;
    let mut s = Scenario::new(code, 0.0);
    let mut perfect_frames = None;
    match sc.mode {
        ScramblingMode::None => {}
        ScramblingMode::Perfect => {
            let l = *single(&sc.frames, "frames")?;
            s = s.with_scrambling(Scrambling::Perfect).with_frames(l);
            perfect_frames = Some(l);
        }
        ScramblingMode::Real => {
            let l = *single(&sc.frames, "frames")?;
            let w = *single(&sc.weights, "weights")?;
            s = s.with_scrambling(Scrambling::Real(Arc::new(sc.pair(k, l, w)?)));
        }
    }
    if let Some(sg) = cfg.channel.sg_db {
        s = s.with_eve(sg);
    }
    let stop = cfg.sim.stop_rule();
    out.simulated(cfg.sim.seed, stop);
    let curves = run_curve(&s, &cfg.grid(), &stop, cfg.sim.seed, cfg.sim.workers).map_err(run_err)?;
    write_sim(out, "", &curves, perfect_frames, Outcome::Done)
}
