//! Sampled error-rate curves, their CSV form, and the security-gap solver.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{AnalyticError, CurveIoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Analytic,
    Simulated,
    /// Simulated frame errors mapped to bit errors by the perfect-scrambling model.
    ModelAdjusted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub ebn0_db: f64,
    pub pe: f64,
    pub pf: f64,
    pub provenance: Provenance,
    pub trials: Option<u64>,
    pub errors: Option<u64>,
}

impl CurvePoint {
    pub fn analytic(ebn0_db: f64, pe: f64, pf: f64) -> Self {
        CurvePoint {
            ebn0_db,
            pe,
            pf,
            provenance: Provenance::Analytic,
            trials: None,
            errors: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorRateCurve {
    points: Vec<CurvePoint>,
}

impl ErrorRateCurve {
    pub fn new(points: Vec<CurvePoint>) -> Result<Self, CurveIoError> {
        if points.windows(2).any(|w| !(w[0].ebn0_db < w[1].ebn0_db)) {
            return Err(CurveIoError::Invalid("Eb/N0 grid must be strictly increasing".into()));
        }
        if let Some(p) = points
            .iter()
            .find(|p| !(0.0..=1.0).contains(&p.pe) || !(0.0..=1.0).contains(&p.pf))
        {
            return Err(CurveIoError::Invalid(format!("probability outside [0, 1] at {} dB", p.ebn0_db)));
        }
        Ok(ErrorRateCurve { points })
    }

    /// Samples `f(db) -> (pe, pf)` on `grid`.
    pub fn from_fn<F: Fn(f64) -> (f64, f64)>(grid: &[f64], f: F) -> Result<Self, CurveIoError> {
        Self::new(
            grid.iter()
                .map(|&x| {
                    let (pe, pf) = f(x);
                    CurvePoint::analytic(x, pe, pf)
                })
                .collect(),
        )
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CurveIoError> {
        let mut out = csv::Writer::from_writer(w);
        for p in &self.points {
            out.serialize(p)?;
        }
        if self.points.is_empty() {
            out.write_record(["ebn0_db", "pe", "pf", "provenance", "trials", "errors"])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, CurveIoError> {
        let mut input = csv::Reader::from_reader(r);
        let points = input.deserialize().collect::<Result<Vec<CurvePoint>, _>>()?;
        Self::new(points)
    }

    /// Eb/N0 where `pe` first falls to `threshold`, interpolating log10(pe)
    /// linearly in dB and refining by bisection to 0.001 dB.
    pub fn crossing(&self, threshold: f64) -> Result<f64, AnalyticError> {
        self.crossing_by(threshold, |p| p.pe)
    }

    /// As [`ErrorRateCurve::crossing`], on the frame error probability.
    pub fn crossing_pf(&self, threshold: f64) -> Result<f64, AnalyticError> {
        self.crossing_by(threshold, |p| p.pf)
    }

    fn crossing_by(&self, threshold: f64, value: impl Fn(&CurvePoint) -> f64) -> Result<f64, AnalyticError> {
        let not = AnalyticError::NotBracketed { threshold };
        for seg in self.points.windows(2) {
            let (x0, y0) = (seg[0].ebn0_db, value(&seg[0]));
            let (x1, y1) = (seg[1].ebn0_db, value(&seg[1]));
            if !(y0 >= threshold && y1 <= threshold) || y0 == y1 {
                continue;
            }
            let interp = |x: f64| -> f64 {
                let s = (x - x0) / (x1 - x0);
                if y0 > 0.0 && y1 > 0.0 {
                    y0.log10() + s * (y1.log10() - y0.log10()) - threshold.log10()
                } else {
                    y0 + s * (y1 - y0) - threshold
                }
            };
            return crate::analytic::special::bisect(interp, x0, x1, 1e-3).ok_or(not);
        }
        Err(not)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityGapQuery {
    pub bob_threshold: f64,
    pub eve_threshold: f64,
}

impl Default for SecurityGapQuery {
    fn default() -> Self {
        SecurityGapQuery {
            bob_threshold: 1e-5,
            eve_threshold: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityGap {
    pub bob_db: f64,
    pub eve_db: f64,
    pub gap_db: f64,
}

/// `Eb/N0|B(Pe = bob) - Eb/N0|E(Pe = eve)`.
pub fn security_gap(
    bob: &ErrorRateCurve,
    eve: &ErrorRateCurve,
    query: &SecurityGapQuery,
) -> Result<SecurityGap, AnalyticError> {
    if !(query.bob_threshold > 0.0
        && query.bob_threshold <= query.eve_threshold
        && query.eve_threshold <= 0.5)
    {
        return Err(AnalyticError::InvalidArgument(format!(
            "thresholds {:e} / {}",
            query.bob_threshold, query.eve_threshold
        )));
    }
    let bob_db = bob.crossing(query.bob_threshold)?;
    let eve_db = eve.crossing(query.eve_threshold)?;
    Ok(SecurityGap {
        bob_db,
        eve_db,
        gap_db: bob_db - eve_db,
    })
}

/// Evenly spaced grid from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}
