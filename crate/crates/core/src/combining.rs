//! Optimal channel combining against a linear encoder.
//!
//! One stage of the decoder problem: the source has prior variance
//! `prior_var` (the source variance in the single-stage game, the one-step
//! prediction variance in the multi-stage game), the encoder sends `a * x`,
//! and the decoder picks `alpha` and a gain `k` to minimise the mean-square
//! error of `k * (alpha * y + (1 - alpha) * z)`.

use serde::{Deserialize, Serialize};

use crate::params::ChannelNoise;

/// Which of the three optimal-decoder regimes applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableCase {
    /// `a >= 0`: both channels are mixed (maximum-ratio combining).
    Combining,
    /// `-sqrt(sigma_v2 / sigma_w2) <= a < 0`: only the side channel is used.
    SideChannel,
    /// `a < -sqrt(sigma_v2 / sigma_w2)`: only the encoder channel is used.
    EncoderChannel,
}

impl TableCase {
    pub fn label(self) -> &'static str {
        match self {
            TableCase::Combining => "combining (a >= 0)",
            TableCase::SideChannel => "side channel only",
            TableCase::EncoderChannel => "encoder channel only",
        }
    }
}

/// Optimal decoder parameters for one regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub case: TableCase,
    pub alpha: f64,
    /// Gain applied to the combined input.
    pub gain: f64,
    /// Resulting mean-square error (posterior variance).
    pub j_d: f64,
}

/// Regime for encoder slope `a`.
///
/// Ties at `a = -sqrt(sigma_v2 / sigma_w2)` go to the side channel; at
/// `a = 0` the combining row already reduces to the side-channel values.
pub fn select_case(a: f64, noise: ChannelNoise) -> TableCase {
    if a >= 0.0 {
        TableCase::Combining
    } else if a * a <= noise.sigma_v2 / noise.sigma_w2 {
        TableCase::SideChannel
    } else {
        TableCase::EncoderChannel
    }
}

/// Evaluates one row's closed forms regardless of whether `a` lies in it.
pub fn evaluate_row(case: TableCase, a: f64, prior_var: f64, noise: ChannelNoise) -> TableRow {
    let s = prior_var;
    let ChannelNoise { sigma_v2: v, sigma_w2: w } = noise;
    match case {
        TableCase::Combining => TableRow {
            case,
            alpha: a * w / (a * w + v),
            gain: (a * s * w + s * v) / (a * a * s * w + s * v + w * v),
            j_d: s * w * v / ((a * a * w + v) * s + w * v),
        },
        TableCase::SideChannel => TableRow {
            case,
            alpha: 0.0,
            gain: s / (s + w),
            j_d: s * w / (s + w),
        },
        TableCase::EncoderChannel => TableRow {
            case,
            alpha: 1.0,
            gain: a * s / (a * a * s + v),
            j_d: s * v / (a * a * s + v),
        },
    }
}

/// Optimal `(alpha, gain)` and the resulting error for encoder slope `a`.
pub fn optimal_combining(a: f64, prior_var: f64, noise: ChannelNoise) -> TableRow {
    evaluate_row(select_case(a, noise), a, prior_var, noise)
}
