//! Single-stage game: best responses, exact costs, the estimation-error lower
//! bound, and the Stackelberg equilibrium.

use serde::{Deserialize, Serialize};

use crate::combining::{optimal_combining, TableCase};
use crate::error::{Error, Result};
use crate::params::{AffineDecoder, AffineEncoder, ChannelNoise, EquilibriumReport, GameParams, Validity};

/// Expected costs of a strategy pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Costs {
    pub j_e: f64,
    pub j_d: f64,
}

/// Decoder best response together with the regime it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderResponse {
    pub decoder: AffineDecoder,
    pub j_d: f64,
    pub case: TableCase,
}

/// Optimal decoder against the affine encoder `m = a x + c`.
///
/// The offset removes the known mean `alpha * c` of the combined input, so
/// the resulting error does not depend on `c`.
pub fn decoder_best_response(enc: &AffineEncoder, p: &GameParams) -> Result<DecoderResponse> {
    p.validate()?;
    enc.validate()?;
    let row = optimal_combining(enc.a, p.sigma_x2, p.noise());
    // + 0.0 folds a negative zero into +0.
    let l = -(row.gain * row.alpha * enc.c) + 0.0;
    Ok(DecoderResponse {
        decoder: AffineDecoder::new(row.gain, l, row.alpha),
        j_d: row.j_d,
        case: row.case,
    })
}

/// Encoder cost minimiser against the affine decoder `x_hat = k r + l`.
///
/// Fails when `alpha^2 k^2 + theta = 0`: the message is then either ignored
/// and free, so no unique minimiser exists.
pub fn encoder_best_response(dec: &AffineDecoder, p: &GameParams) -> Result<AffineEncoder> {
    p.validate()?;
    dec.validate()?;
    let ak = dec.alpha * dec.k;
    let denom = ak * ak + p.theta;
    if denom <= 0.0 {
        return Err(Error::NoUniqueEncoderResponse);
    }
    let a = ak * (1.0 - (1.0 - dec.alpha) * dec.k) / denom + 0.0;
    let c = -ak * (dec.l + p.bias) / denom + 0.0;
    Ok(AffineEncoder::new(a, c))
}

/// Exact expected costs of an affine strategy pair.
pub fn evaluate_costs(enc: &AffineEncoder, dec: &AffineDecoder, p: &GameParams) -> Costs {
    let AffineEncoder { a, c } = *enc;
    let AffineDecoder { k, l, alpha } = *dec;
    let signal = 1.0 - (alpha * a + 1.0 - alpha) * k;
    let spread = signal * signal * p.sigma_x2
        + alpha * alpha * k * k * p.sigma_v2
        + (1.0 - alpha) * (1.0 - alpha) * k * k * p.sigma_w2;
    let offset = alpha * k * c + l;
    let j_d = spread + offset * offset;
    let biased = offset + p.bias;
    let power = a * a * p.sigma_x2 + c * c;
    let j_e = spread + biased * biased + p.theta * power;
    Costs { j_e, j_d }
}

/// Smallest achievable mean-square error when the encoder spends power
/// `power = E[m^2]`.
pub fn estimation_error_lower_bound(power: f64, p: &GameParams) -> Result<f64> {
    p.validate()?;
    if !(power >= 0.0 && power.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "power must be finite and >= 0 (got {power})"
        )));
    }
    Ok(p.sigma_x2 / (power / p.sigma_v2 + p.sigma_x2 / p.sigma_w2 + 1.0))
}

/// Power weight at and above which the leader stops transmitting.
pub fn stackelberg_threshold(prior_var: f64, noise: ChannelNoise) -> f64 {
    let snr = prior_var / noise.sigma_w2 + 1.0;
    prior_var / (noise.sigma_v2 * snr * snr)
}

/// Squared leader slope from the transmission decision rule.
///
/// Shared by the single-stage and multi-stage solvers so that a horizon-0
/// instance reproduces the single-stage equilibrium exactly.
pub fn stackelberg_slope_sq(prior_var: f64, noise: ChannelNoise, theta: f64) -> f64 {
    if theta < stackelberg_threshold(prior_var, noise) {
        let v_over_s = noise.sigma_v2 / prior_var;
        let a_sq = libm::sqrt(v_over_s / theta) - v_over_s * (prior_var / noise.sigma_w2 + 1.0);
        // rounding just below the threshold can leave a tiny negative value
        a_sq.max(0.0)
    } else {
        0.0
    }
}

fn require_positive_theta(theta: f64) -> Result<()> {
    if theta > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveTheta(theta))
    }
}

/// Leader cost of committing to `m = a x` when the decoder best-responds.
pub fn leader_cost(a: f64, p: &GameParams) -> Result<f64> {
    let enc = AffineEncoder::linear(a);
    let resp = decoder_best_response(&enc, p)?;
    Ok(evaluate_costs(&enc, &resp.decoder, p).j_e)
}

/// The Stackelberg equilibrium with the encoder as leader.
///
/// The equilibrium is linear with a nonnegative slope; the decoder is the
/// best response to it.
pub fn stackelberg_equilibrium(p: &GameParams) -> Result<EquilibriumReport> {
    p.validate()?;
    require_positive_theta(p.theta)?;
    let noise = p.noise();
    let a_sq = stackelberg_slope_sq(p.sigma_x2, noise, p.theta);
    let a = libm::sqrt(a_sq);
    let row = optimal_combining(a, p.sigma_x2, noise);
    let j_d = row.j_d;
    let j_e = j_d + p.theta * a_sq * p.sigma_x2 + p.bias * p.bias;
    let bound = estimation_error_lower_bound(a_sq * p.sigma_x2, p)?;
    Ok(EquilibriumReport {
        encoder: AffineEncoder::linear(a),
        decoder: AffineDecoder::new(row.gain, 0.0, row.alpha),
        j_e,
        j_d,
        validity: Validity {
            case: row.case,
            transmitting: a_sq > 0.0,
            bound_achieved: (bound - j_d).abs() <= 1e-12 * j_d.max(1.0),
        },
    })
}
