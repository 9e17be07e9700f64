//! BPSK-input AWGN capacity and the eavesdropper's equivocation rate.

use serde::{Deserialize, Serialize};

use crate::analytic::special::integrate;
use crate::channel::db_to_linear;
use crate::error::AnalyticError;

/// Capacity in bits per use of `y = x + n`, `x = ±1`, `n ~ N(0, 1/(2·es_n0))`.
pub fn bpsk_awgn_capacity(es_n0: f64) -> Result<f64, AnalyticError> {
    if !(es_n0 >= 0.0) {
        return Err(AnalyticError::InvalidArgument(format!("SNR {es_n0}")));
    }
    if es_n0 == 0.0 {
        return Ok(0.0);
    }
    if es_n0.is_infinite() {
        return Ok(1.0);
    }
    // LLR of x = +1 is Gaussian with mean μ and variance 2μ, μ = 4·Es/N0
    let mu = 4.0 * es_n0;
    let sd = (2.0 * mu).sqrt();
    let loss = |z: f64| {
        let l = mu + sd * z;
        let softplus = if l > 0.0 { (-l).exp().ln_1p() } else { -l + l.exp().ln_1p() };
        (-0.5 * z * z).exp() * softplus
    };
    let e = integrate(loss, -40.0, 40.0, 0.0, 1e-11)? / (2.0 * std::f64::consts::PI).sqrt();
    Ok((1.0 - e / std::f64::consts::LN_2).clamp(0.0, 1.0))
}

/// How the Eb/N0 of the eavesdropper maps to the capacity argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityConvention {
    /// Unit-variance noise and amplitude `√(R·Eb/N0)`, i.e. `Es/N0 = R·Eb/N0 / 2`.
    /// The default.
    #[default]
    UnitNoise,
    /// `Es/N0 = R·Eb/N0`.
    SymbolSnr,
}

impl CapacityConvention {
    pub fn es_n0(self, rate: f64, eb_n0_db: f64) -> f64 {
        let s = rate * db_to_linear(eb_n0_db);
        match self {
            CapacityConvention::UnitNoise => 0.5 * s,
            CapacityConvention::SymbolSnr => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivocationPoint {
    pub rs: f64,
    pub rate: f64,
    pub eb_n0_bob_db: f64,
    pub eb_n0_eve_db: f64,
    pub capacity: f64,
    pub re: f64,
    pub re_fraction: f64,
    /// Set when `R_e < 0`: Eve's channel supports the full rate.
    pub negative: bool,
}

/// `R_e = R - C(Eve)` and `R̃_e = R_e / R_s`, with `R = R_s`.
pub fn equivocation(
    rs: f64,
    sg_db: f64,
    eb_n0_bob_db: f64,
    convention: CapacityConvention,
) -> Result<EquivocationPoint, AnalyticError> {
    if !(rs > 0.0 && rs <= 1.0) {
        return Err(AnalyticError::InvalidArgument(format!("R_s {rs}")));
    }
    let eve = eb_n0_bob_db - sg_db;
    let capacity = bpsk_awgn_capacity(convention.es_n0(rs, eve))?;
    let re = rs - capacity;
    Ok(EquivocationPoint {
        rs,
        rate: rs,
        eb_n0_bob_db,
        eb_n0_eve_db: eve,
        capacity,
        re,
        re_fraction: re / rs,
        negative: re < 0.0,
    })
}
