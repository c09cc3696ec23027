use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::GameParams;

/// Grid minimiser of the decoder cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleDecoder {
    pub alpha: f64,
    pub k: f64,
    pub l: f64,
    pub j_d: f64,
}

fn grid_points(span: f64, step: f64) -> Result<u64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!("grid_step must be > 0 (got {step})")));
    }
    Ok(libm::round(span / step).max(1.0) as u64)
}

/// Exhaustive decoder search against `m = a x + c`.
///
/// Scans `alpha` over `[0, 1]` (both endpoints included); at each ratio the
/// gain and offset are the exact one-dimensional quadratic minimisers. The
/// first (smallest-`alpha`) minimiser wins ties.
pub fn brute_force_decoder_oracle(a: f64, c: f64, p: &GameParams, grid_step: f64) -> Result<OracleDecoder> {
    p.validate()?;
    let intervals = grid_points(1.0, grid_step)?;
    let mut best: Option<OracleDecoder> = None;
    for i in 0..=intervals {
        let alpha = i as f64 / intervals as f64;
        let g = alpha * a + 1.0 - alpha;
        let noise = alpha * alpha * p.sigma_v2 + (1.0 - alpha) * (1.0 - alpha) * p.sigma_w2;
        // minimise (1 - g k)^2 sx + k^2 noise over k
        let denom = g * g * p.sigma_x2 + noise;
        let k = if denom > 0.0 { g * p.sigma_x2 / denom } else { 0.0 };
        // offset cancels the mean alpha k c of k r
        let l = -alpha * k * c;
        let resid = 1.0 - g * k;
        let mean = alpha * k * c + l;
        let j_d = resid * resid * p.sigma_x2 + k * k * noise + mean * mean;
        if best.is_none_or(|b| j_d < b.j_d) {
            best = Some(OracleDecoder { alpha, k, l, j_d });
        }
    }
    Ok(best.expect("grid has at least two points"))
}

/// Grid minimiser of the leader's lower-bound objective
/// `sx / (P / sv + sx / sw + 1) + theta P` over `P` in `[0, p_max]`.
pub fn brute_force_encoder_power_oracle(p: &GameParams, p_max: f64, grid_step: f64) -> Result<f64> {
    p.validate()?;
    if !(p.theta > 0.0) {
        return Err(Error::NonPositiveTheta(p.theta));
    }
    if !(p_max > 0.0 && p_max.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!("p_max must be > 0 (got {p_max})")));
    }
    let intervals = grid_points(p_max, grid_step)?;
    let objective = |power: f64| p.sigma_x2 / (power / p.sigma_v2 + p.sigma_x2 / p.sigma_w2 + 1.0) + p.theta * power;
    let mut best = (0.0, objective(0.0));
    for i in 1..=intervals {
        let power = p_max * (i as f64 / intervals as f64);
        let value = objective(power);
        if value < best.1 {
            best = (power, value);
        }
    }
    Ok(best.0)
}
