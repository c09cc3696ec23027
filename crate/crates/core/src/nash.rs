//! Affine Nash equilibria of the single-stage game.
//!
//! Candidates come from closed forms; every candidate is checked as a joint
//! fixed point of the two best-response maps before it is reported.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{AffineDecoder, AffineEncoder, GameParams};
use crate::single_stage::{decoder_best_response, encoder_best_response, stackelberg_threshold};

/// Residual below which a candidate counts as an equilibrium.
pub const FIXED_POINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NashKind {
    InformativePositive,
    InformativeNegative,
    NonInformative,
}

impl NashKind {
    /// Classifies by the sign of the encoder slope.
    pub fn of_slope(a: f64, tol: f64) -> Self {
        if a > tol {
            NashKind::InformativePositive
        } else if a < -tol {
            NashKind::InformativeNegative
        } else {
            NashKind::NonInformative
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NashEquilibrium {
    pub encoder: AffineEncoder,
    pub decoder: AffineDecoder,
    pub kind: NashKind,
    /// Largest componentwise move under one round of best responses.
    pub fixed_point_residual: f64,
}

/// Outcome of one round of best responses from a strategy pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointCheck {
    pub residual: f64,
    pub is_equilibrium: bool,
}

fn require_positive_theta(p: &GameParams) -> Result<()> {
    p.validate()?;
    if p.theta > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveTheta(p.theta))
    }
}

fn max_abs_diff(enc: &AffineEncoder, dec: &AffineDecoder, enc2: &AffineEncoder, dec2: &AffineDecoder) -> f64 {
    [
        enc.a - enc2.a,
        enc.c - enc2.c,
        dec.k - dec2.k,
        dec.l - dec2.l,
        dec.alpha - dec2.alpha,
    ]
    .iter()
    .fold(0.0_f64, |m, d| m.max(d.abs()))
}

/// Componentwise distance between `(enc, dec)` and the best responses to
/// them.
pub fn verify_fixed_point(
    enc: &AffineEncoder,
    dec: &AffineDecoder,
    p: &GameParams,
    tol: f64,
) -> Result<FixedPointCheck> {
    require_positive_theta(p)?;
    let enc_br = encoder_best_response(dec, p)?;
    let dec_br = decoder_best_response(enc, p)?.decoder;
    let residual = max_abs_diff(enc, dec, &enc_br, &dec_br);
    Ok(FixedPointCheck {
        residual,
        is_equilibrium: residual <= tol,
    })
}

/// Closed-form candidate before verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NashCandidate {
    pub encoder: AffineEncoder,
    pub decoder: AffineDecoder,
    pub kind: NashKind,
    pub check: FixedPointCheck,
}

/// Closed-form candidates, each with its fixed-point check.
///
/// The non-informative pair is always a candidate; below the transmission
/// threshold the positive- and negative-slope pairs are added.
pub fn nash_candidates(p: &GameParams) -> Result<Vec<NashCandidate>> {
    require_positive_theta(p)?;
    let GameParams {
        sigma_x2: sx,
        sigma_v2: sv,
        sigma_w2: sw,
        theta,
        bias,
    } = *p;
    let mut pairs = Vec::with_capacity(3);

    if theta < stackelberg_threshold(sx, p.noise()) {
        // positive slope: combining regime, decoder from its best response
        let a = libm::sqrt(libm::sqrt(sv / (theta * sx)) - sv / sw - sv / sx);
        let row = decoder_best_response(&AffineEncoder::linear(a), p)?.decoder;
        let ak = row.alpha * row.k;
        let c = -ak * bias / theta;
        let l = ak * ak * bias / theta;
        pairs.push((
            AffineEncoder::new(a, c),
            AffineDecoder::new(row.k, l, row.alpha),
            NashKind::InformativePositive,
        ));

        // negative slope: encoder channel only, gain carries the slope's sign
        let a = -libm::sqrt(libm::sqrt(sv / (theta * sx)) - sv / sx);
        let k = a * sx / (a * a * sx + sv);
        let c = -k * bias / theta;
        let l = k * k * bias / theta;
        pairs.push((
            AffineEncoder::new(a, c),
            AffineDecoder::new(k, l, 1.0),
            NashKind::InformativeNegative,
        ));
    }

    pairs.push((
        AffineEncoder::new(0.0, 0.0),
        AffineDecoder::new(sx / (sx + sw), 0.0, 0.0),
        NashKind::NonInformative,
    ));

    pairs
        .into_iter()
        .map(|(encoder, decoder, kind)| {
            let check = verify_fixed_point(&encoder, &decoder, p, FIXED_POINT_TOL)?;
            Ok(NashCandidate {
                encoder,
                decoder,
                kind,
                check,
            })
        })
        .collect()
}

/// All verified affine Nash equilibria, informative ones first.
pub fn nash_equilibria(p: &GameParams) -> Result<Vec<NashEquilibrium>> {
    let mut out = Vec::with_capacity(3);
    for cand in nash_candidates(p)? {
        if cand.check.is_equilibrium {
            out.push(NashEquilibrium {
                encoder: cand.encoder,
                decoder: cand.decoder,
                kind: cand.kind,
                fixed_point_residual: cand.check.residual,
            });
        } else {
            log::warn!(
                "dropping {:?} candidate (a = {}, k = {}): fixed-point residual {:e}",
                cand.kind,
                cand.encoder.a,
                cand.decoder.k,
                cand.check.residual
            );
        }
    }
    Ok(out)
}

/// Result of alternating best responses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationOutcome {
    /// Last iterate; a verified fixed point when `converged` is true.
    pub equilibrium: NashEquilibrium,
    pub converged: bool,
    pub iterations: usize,
}

/// Alternates decoder and encoder best responses starting from `init`.
///
/// Stops when one round moves every component by at most `tol`, or after
/// `max_iter` rounds. Non-convergence is reported, not raised.
pub fn best_response_iteration(
    init: (AffineEncoder, AffineDecoder),
    p: &GameParams,
    max_iter: usize,
    tol: f64,
) -> Result<IterationOutcome> {
    require_positive_theta(p)?;
    let (mut enc, mut dec) = init;
    let mut step = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let next_dec = decoder_best_response(&enc, p)?.decoder;
        let next_enc = encoder_best_response(&next_dec, p)?;
        step = max_abs_diff(&enc, &dec, &next_enc, &next_dec);
        enc = next_enc;
        dec = next_dec;
        if step <= tol {
            break;
        }
    }
    let check = verify_fixed_point(&enc, &dec, p, tol.max(FIXED_POINT_TOL))?;
    Ok(IterationOutcome {
        equilibrium: NashEquilibrium {
            encoder: enc,
            decoder: dec,
            kind: NashKind::of_slope(enc.a, tol.max(FIXED_POINT_TOL)),
            fixed_point_residual: check.residual,
        },
        converged: step <= tol && check.is_equilibrium,
        iterations,
    })
}
