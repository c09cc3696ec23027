//! Problem instances and strategy types shared by every solver.
//!
//! All variances are stored as variances (never standard deviations). Field
//! names double as configuration keys.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::combining::TableCase;
use crate::error::ParamError;

fn check_finite(field: &str, value: f64) -> Result<(), ParamError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ParamError::NotFinite {
            field: field.to_string(),
            value,
        })
    }
}

fn check_positive(field: &str, value: f64) -> Result<(), ParamError> {
    check_finite(field, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(ParamError::NotPositive {
            field: field.to_string(),
            value,
        })
    }
}

fn check_nonnegative(field: &str, value: f64) -> Result<(), ParamError> {
    check_finite(field, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(ParamError::Negative {
            field: field.to_string(),
            value,
        })
    }
}

fn check_len(
    field: &str,
    expected_rule: &'static str,
    expected: usize,
    got: usize,
) -> Result<(), ParamError> {
    if expected == got {
        Ok(())
    } else {
        Err(ParamError::WrongLength {
            field: field.to_string(),
            expected_rule,
            expected,
            got,
        })
    }
}

fn indexed(field: &str, t: usize) -> String {
    format!("{field}[{t}]")
}

/// Single-stage game instance.
///
/// `theta = 0` (no power penalty) is a valid instance; solvers whose decision
/// rules divide by `theta` reject it themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameParams {
    /// Source variance.
    pub sigma_x2: f64,
    /// Encoder-channel noise variance.
    pub sigma_v2: f64,
    /// Side-channel noise variance.
    pub sigma_w2: f64,
    /// Soft power weight.
    pub theta: f64,
    /// Common-knowledge bias between the two objectives.
    pub bias: f64,
}

impl GameParams {
    pub fn new(sigma_x2: f64, sigma_v2: f64, sigma_w2: f64, theta: f64, bias: f64) -> Self {
        Self {
            sigma_x2,
            sigma_v2,
            sigma_w2,
            theta,
            bias,
        }
    }

    /// Checks every invariant and reports the first one violated.
    pub fn validate(&self) -> Result<&Self, ParamError> {
        check_positive("sigma_x2", self.sigma_x2)?;
        check_positive("sigma_v2", self.sigma_v2)?;
        check_positive("sigma_w2", self.sigma_w2)?;
        check_nonnegative("theta", self.theta)?;
        check_finite("bias", self.bias)?;
        Ok(self)
    }

    pub fn noise(&self) -> ChannelNoise {
        ChannelNoise {
            sigma_v2: self.sigma_v2,
            sigma_w2: self.sigma_w2,
        }
    }
}

/// Noise variances of the two channels reaching the decoder at one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelNoise {
    /// Encoder channel, `y = m + v`.
    pub sigma_v2: f64,
    /// Side channel, `z = x + w`.
    pub sigma_w2: f64,
}

/// Affine encoder `m = a * x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineEncoder {
    pub a: f64,
    pub c: f64,
}

impl AffineEncoder {
    pub fn new(a: f64, c: f64) -> Self {
        Self { a, c }
    }

    pub fn linear(a: f64) -> Self {
        Self { a, c: 0.0 }
    }

    pub fn validate(&self) -> Result<&Self, ParamError> {
        check_finite("a", self.a)?;
        check_finite("c", self.c)?;
        Ok(self)
    }

    #[inline]
    pub fn encode(&self, x: f64) -> f64 {
        self.a * x + self.c
    }
}

/// Affine decoder `x_hat = k * r + l` acting on the combined input
/// `r = alpha * y + (1 - alpha) * z`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineDecoder {
    pub k: f64,
    pub l: f64,
    pub alpha: f64,
}

impl AffineDecoder {
    pub fn new(k: f64, l: f64, alpha: f64) -> Self {
        Self { k, l, alpha }
    }

    pub fn validate(&self) -> Result<&Self, ParamError> {
        check_finite("k", self.k)?;
        check_finite("l", self.l)?;
        check_finite("alpha", self.alpha)?;
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(ParamError::OutOfUnitInterval {
                field: "alpha".to_string(),
                value: self.alpha,
            });
        }
        Ok(self)
    }

    #[inline]
    pub fn combine(&self, y: f64, z: f64) -> f64 {
        self.alpha * y + (1.0 - self.alpha) * z
    }

    #[inline]
    pub fn decode(&self, r: f64) -> f64 {
        self.k * r + self.l
    }
}

/// Multi-stage instance over stages `t = 0..=n` driven by the Gauss-Markov
/// source `x_{t+1} = beta[t] x_t + n_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiStageParams {
    /// Last stage index; the horizon has `n + 1` stages.
    pub n: usize,
    /// Transition coefficients, length `n`.
    pub beta: Vec<f64>,
    /// Process-noise variances, length `n`.
    pub sigma_n2: Vec<f64>,
    /// Initial source variance.
    pub sigma_x0_2: f64,
    /// Side-channel noise variances, length `n + 1`.
    pub sigma_w2: Vec<f64>,
    /// Encoder-channel noise variances, length `n + 1`.
    pub sigma_v2: Vec<f64>,
    /// Per-stage soft power weights, length `n + 1`, all > 0.
    pub theta: Vec<f64>,
    /// Per-stage biases, length `n + 1`.
    pub bias: Vec<f64>,
}

impl MultiStageParams {
    /// Time-invariant instance: every per-stage quantity takes the same value.
    #[allow(clippy::too_many_arguments)]
    pub fn uniform(
        n: usize,
        beta: f64,
        sigma_n2: f64,
        sigma_x0_2: f64,
        sigma_v2: f64,
        sigma_w2: f64,
        theta: f64,
        bias: f64,
    ) -> Self {
        Self {
            n,
            beta: alloc::vec![beta; n],
            sigma_n2: alloc::vec![sigma_n2; n],
            sigma_x0_2,
            sigma_w2: alloc::vec![sigma_w2; n + 1],
            sigma_v2: alloc::vec![sigma_v2; n + 1],
            theta: alloc::vec![theta; n + 1],
            bias: alloc::vec![bias; n + 1],
        }
    }

    /// Horizon-0 instance equivalent to a single-stage game.
    pub fn from_single_stage(p: &GameParams) -> Self {
        Self::uniform(0, 0.0, 0.0, p.sigma_x2, p.sigma_v2, p.sigma_w2, p.theta, p.bias)
    }

    pub fn stages(&self) -> usize {
        self.n + 1
    }

    pub fn noise(&self, t: usize) -> ChannelNoise {
        ChannelNoise {
            sigma_v2: self.sigma_v2[t],
            sigma_w2: self.sigma_w2[t],
        }
    }

    pub fn validate(&self) -> Result<&Self, ParamError> {
        let n = self.n;
        check_len("beta", "n", n, self.beta.len())?;
        check_len("sigma_n2", "n", n, self.sigma_n2.len())?;
        check_len("sigma_w2", "n + 1", n + 1, self.sigma_w2.len())?;
        check_len("sigma_v2", "n + 1", n + 1, self.sigma_v2.len())?;
        check_len("theta", "n + 1", n + 1, self.theta.len())?;
        check_len("bias", "n + 1", n + 1, self.bias.len())?;
        check_positive("sigma_x0_2", self.sigma_x0_2)?;
        for (t, &b) in self.beta.iter().enumerate() {
            check_finite(&indexed("beta", t), b)?;
        }
        for (t, &s) in self.sigma_n2.iter().enumerate() {
            check_positive(&indexed("sigma_n2", t), s)?;
        }
        for t in 0..=n {
            check_positive(&indexed("sigma_w2", t), self.sigma_w2[t])?;
            check_positive(&indexed("sigma_v2", t), self.sigma_v2[t])?;
            check_positive(&indexed("theta", t), self.theta[t])?;
            check_finite(&indexed("bias", t), self.bias[t])?;
        }
        Ok(self)
    }
}

/// Which cases applied and which self-checks passed for a reported
/// equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    /// Decoder row used at the equilibrium encoder.
    pub case: TableCase,
    /// `theta` strictly below the transmission threshold.
    pub transmitting: bool,
    /// Decoder cost equals the estimation-error lower bound at the
    /// equilibrium power.
    pub bound_achieved: bool,
}

/// Equilibrium strategies with their expected costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub encoder: AffineEncoder,
    pub decoder: AffineDecoder,
    /// Encoder expected cost, `j_d + theta E[m^2] + b^2` at a Stackelberg point.
    pub j_e: f64,
    /// Decoder expected cost (mean-square error).
    pub j_d: f64,
    pub validity: Validity,
}
