//! Multi-stage game over a Gauss-Markov source.
//!
//! The decoder is a scalar Kalman filter on the combined input. Its variance
//! recursion does not depend on the observed values, so the equilibrium is
//! computed forward in time without simulation.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::combining::{optimal_combining, TableCase, TableRow};
use crate::error::{Error, Result};
use crate::params::{ChannelNoise, MultiStageParams};
use crate::single_stage::{stackelberg_slope_sq, Costs};

/// How the encoder forms its message at each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderMode {
    /// `m_t = a_t x_t`.
    Memoryless,
    /// `m_t = a_t (x_t - x_hat_{t|t-1})`, using noiseless feedback of the
    /// decoder input.
    #[default]
    Innovations,
}

/// One-step prediction `x_hat_{t|t-1}`, `Sigma_{t|t-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub mean: f64,
    pub var: f64,
}

impl Prediction {
    /// Prior at stage 0: zero mean, initial source variance.
    pub fn initial(sigma_x0_2: f64) -> Self {
        Self {
            mean: 0.0,
            var: sigma_x0_2,
        }
    }
}

/// Filter quantities after processing stage `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterState {
    pub x_pred: f64,
    pub sigma_pred: f64,
    pub x_upd: f64,
    pub sigma_upd: f64,
    pub gain: f64,
    pub innov_var: f64,
}

impl FilterState {
    /// Time update through `x_{t+1} = beta x_t + n_t`.
    pub fn predict(&self, beta: f64, sigma_n2: f64) -> Prediction {
        Prediction {
            mean: beta * self.x_upd,
            var: beta * beta * self.sigma_upd + sigma_n2,
        }
    }
}

/// Encoder slope and decoder combining ratio in force at one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageInput {
    pub a: f64,
    pub alpha: f64,
}

impl StageInput {
    /// Coefficient of the source in the combined input.
    #[inline]
    pub fn effective_slope(&self) -> f64 {
        self.alpha * self.a + 1.0 - self.alpha
    }

    /// Conditional mean of the combined input given past inputs.
    #[inline]
    pub fn predicted_observation(&self, x_pred: f64, mode: EncoderMode) -> f64 {
        match mode {
            EncoderMode::Memoryless => self.effective_slope() * x_pred,
            // the message already has the prediction removed
            EncoderMode::Innovations => (1.0 - self.alpha) * x_pred,
        }
    }
}

/// Measurement update with the combined input `r`.
pub fn kalman_update(
    prior: Prediction,
    input: StageInput,
    noise: ChannelNoise,
    mode: EncoderMode,
    r: f64,
) -> Result<FilterState> {
    let g = input.effective_slope();
    let innov_var = g * g * prior.var
        + (1.0 - input.alpha) * (1.0 - input.alpha) * noise.sigma_w2
        + input.alpha * input.alpha * noise.sigma_v2;
    if !(innov_var > 0.0) {
        return Err(Error::DegenerateObservation(innov_var));
    }
    let gain = prior.var * g / innov_var;
    let innovation = r - input.predicted_observation(prior.mean, mode);
    Ok(FilterState {
        x_pred: prior.mean,
        sigma_pred: prior.var,
        x_upd: prior.mean + gain * innovation,
        sigma_upd: (1.0 - gain * g) * prior.var,
        gain,
        innov_var,
    })
}

/// Prediction from the previous stage followed by the update at this one.
pub fn kalman_step(
    prev: &FilterState,
    beta: f64,
    sigma_n2: f64,
    input: StageInput,
    noise: ChannelNoise,
    mode: EncoderMode,
    r: f64,
) -> Result<FilterState> {
    kalman_update(prev.predict(beta, sigma_n2), input, noise, mode, r)
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            what,
            expected,
            got,
        })
    }
}

/// Filter trajectory over the whole horizon for the given observations.
pub fn run_filter(
    p: &MultiStageParams,
    inputs: &[StageInput],
    mode: EncoderMode,
    observations: &[f64],
) -> Result<Vec<FilterState>> {
    p.validate()?;
    check_len("stage inputs", p.stages(), inputs.len())?;
    check_len("observations", p.stages(), observations.len())?;
    let mut out: Vec<FilterState> = Vec::with_capacity(p.stages());
    for t in 0..p.stages() {
        let prior = match out.last() {
            None => Prediction::initial(p.sigma_x0_2),
            Some(prev) => prev.predict(p.beta[t - 1], p.sigma_n2[t - 1]),
        };
        out.push(kalman_update(prior, inputs[t], p.noise(t), mode, observations[t])?);
    }
    Ok(out)
}

/// Variance and gain trajectory; identical to the variance part of
/// [`run_filter`] for any observation sequence.
pub fn riccati(p: &MultiStageParams, inputs: &[StageInput]) -> Result<Vec<FilterState>> {
    let zeros = alloc::vec![0.0; p.stages()];
    run_filter(p, inputs, EncoderMode::Memoryless, &zeros)
}

/// Per-stage decoder best response for slope `a` and prediction variance
/// `sigma_pred`.
pub fn decoder_stage_best_response(a: f64, sigma_pred: f64, noise: ChannelNoise) -> Result<TableRow> {
    if !(sigma_pred > 0.0 && sigma_pred.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "prediction variance must be finite and > 0 (got {sigma_pred})"
        )));
    }
    Ok(optimal_combining(a, sigma_pred, noise))
}

/// Stage inputs with each `alpha_t` chosen optimally along the resulting
/// variance path.
pub fn table_optimal_inputs(p: &MultiStageParams, slopes: &[f64]) -> Result<Vec<StageInput>> {
    p.validate()?;
    check_len("slopes", p.stages(), slopes.len())?;
    let mut inputs = Vec::with_capacity(p.stages());
    let mut prior_var = p.sigma_x0_2;
    for (t, &a) in slopes.iter().enumerate() {
        if t > 0 {
            prior_var = p.beta[t - 1] * p.beta[t - 1] * prior_var + p.sigma_n2[t - 1];
        }
        let row = optimal_combining(a, prior_var, p.noise(t));
        inputs.push(StageInput { a, alpha: row.alpha });
        prior_var = row.j_d;
    }
    Ok(inputs)
}

/// Closed-form expected stage costs of a linear encoder with a Kalman decoder.
///
/// The decoder cost is the posterior variance. The message power is
/// `a_t^2 Sigma_{t|t-1}` for the innovations encoder and `a_t^2 Var(x_t)`
/// for the memoryless one.
pub fn analytic_stage_costs(
    p: &MultiStageParams,
    inputs: &[StageInput],
    mode: EncoderMode,
) -> Result<Vec<Costs>> {
    let traj = riccati(p, inputs)?;
    let mut source_var = p.sigma_x0_2;
    let mut costs = Vec::with_capacity(p.stages());
    for (t, st) in traj.iter().enumerate() {
        if t > 0 {
            source_var = p.beta[t - 1] * p.beta[t - 1] * source_var + p.sigma_n2[t - 1];
        }
        let a = inputs[t].a;
        let power = match mode {
            EncoderMode::Memoryless => a * a * source_var,
            EncoderMode::Innovations => a * a * st.sigma_pred,
        };
        let j_d = st.sigma_upd;
        costs.push(Costs {
            j_d,
            j_e: j_d + p.theta[t] * power + p.bias[t] * p.bias[t],
        });
    }
    Ok(costs)
}

/// Equilibrium quantities at one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StagePolicy {
    /// Encoder slope (nonnegative root).
    pub a: f64,
    /// Squared slope from the decision rule.
    pub a_sq: f64,
    pub alpha: f64,
    /// Kalman gain on the combined input.
    pub gain: f64,
    pub j_d: f64,
    pub j_e: f64,
    /// One-step prediction variance entering the stage.
    pub sigma_pred: f64,
    pub case: TableCase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStageReport {
    pub stages: Vec<StagePolicy>,
    pub j_d_avg: f64,
    pub j_e_avg: f64,
}

impl MultiStageReport {
    pub fn inputs(&self) -> Vec<StageInput> {
        self.stages
            .iter()
            .map(|s| StageInput {
                a: s.a,
                alpha: s.alpha,
            })
            .collect()
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.stages.iter().map(|s| s.a).collect()
    }
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

/// Multi-stage Stackelberg equilibrium, computed forward in time.
///
/// Each stage applies the single-stage decision rule with the source variance
/// replaced by the prediction variance, which then propagates through the
/// achieved decoder error.
pub fn multistage_stackelberg(p: &MultiStageParams) -> Result<MultiStageReport> {
    p.validate()?;
    if let Some(&theta) = p.theta.iter().find(|&&th| !(th > 0.0)) {
        return Err(Error::NonPositiveTheta(theta));
    }
    let mut stages: Vec<StagePolicy> = Vec::with_capacity(p.stages());
    for t in 0..p.stages() {
        let sigma_pred = match stages.last() {
            None => p.sigma_x0_2,
            Some(prev) => p.beta[t - 1] * p.beta[t - 1] * prev.j_d + p.sigma_n2[t - 1],
        };
        let noise = p.noise(t);
        let theta = p.theta[t];
        let a_sq = stackelberg_slope_sq(sigma_pred, noise, theta);
        let a = libm::sqrt(a_sq);
        let row = optimal_combining(a, sigma_pred, noise);
        let j_d = row.j_d;
        let j_e = j_d + theta * a_sq * sigma_pred + p.bias[t] * p.bias[t];
        stages.push(StagePolicy {
            a,
            a_sq,
            alpha: row.alpha,
            gain: row.gain,
            j_d,
            j_e,
            sigma_pred,
            case: row.case,
        });
    }
    let j_d_avg = mean(stages.iter().map(|s| s.j_d));
    let j_e_avg = mean(stages.iter().map(|s| s.j_e));
    Ok(MultiStageReport {
        stages,
        j_d_avg,
        j_e_avg,
    })
}

/// Per-stage lower bounds on the decoder error given innovation powers
/// `powers[t] = E[(m_t - E[m_t | r^{t-1}])^2]`.
pub fn multistage_lower_bound(powers: &[f64], p: &MultiStageParams) -> Result<Vec<f64>> {
    p.validate()?;
    check_len("powers", p.stages(), powers.len())?;
    if let Some(&bad) = powers.iter().find(|&&pw| !(pw >= 0.0 && pw.is_finite())) {
        return Err(Error::InvalidArgument(alloc::format!(
            "innovation power must be finite and >= 0 (got {bad})"
        )));
    }
    let mut bounds: Vec<f64> = Vec::with_capacity(p.stages());
    for (t, &power) in powers.iter().enumerate() {
        let s = match bounds.last() {
            None => p.sigma_x0_2,
            Some(&prev) => p.beta[t - 1] * p.beta[t - 1] * prev + p.sigma_n2[t - 1],
        };
        let ChannelNoise { sigma_v2: v, sigma_w2: w } = p.noise(t);
        bounds.push(s * w * v / ((power / s * w + v) * s + w * v));
    }
    Ok(bounds)
}

/// Leader objective at one stage as a function of the squared slope.
pub fn stage_leader_objective(a_sq: f64, sigma_pred: f64, noise: ChannelNoise, theta: f64, bias: f64) -> f64 {
    let ChannelNoise { sigma_v2: v, sigma_w2: w } = noise;
    sigma_pred * w * v / ((a_sq * w + v) * sigma_pred + w * v) + theta * a_sq * sigma_pred + bias * bias
}

/// Stage costs when the encoder commits to the squared slopes `a_sq` (all
/// nonnegative) and the decoder best-responds at every stage.
pub fn stage_costs_for_slopes(p: &MultiStageParams, a_sq: &[f64]) -> Result<Vec<Costs>> {
    p.validate()?;
    check_len("squared slopes", p.stages(), a_sq.len())?;
    let mut out: Vec<Costs> = Vec::with_capacity(p.stages());
    for (t, &s2) in a_sq.iter().enumerate() {
        let sigma_pred = match out.last() {
            None => p.sigma_x0_2,
            Some(prev) => p.beta[t - 1] * p.beta[t - 1] * prev.j_d + p.sigma_n2[t - 1],
        };
        let noise = p.noise(t);
        let j_e = stage_leader_objective(s2, sigma_pred, noise, p.theta[t], p.bias[t]);
        let j_d = stage_leader_objective(s2, sigma_pred, noise, 0.0, 0.0);
        out.push(Costs { j_e, j_d });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: ChannelNoise = ChannelNoise {
        sigma_v2: 1.0,
        sigma_w2: 1.0,
    };

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn first_update_on_unit_instance() {
        let st = kalman_update(
            Prediction::initial(1.0),
            StageInput { a: 1.0, alpha: 0.5 },
            UNIT,
            EncoderMode::Memoryless,
            0.5,
        )
        .unwrap();
        close(st.innov_var, 1.5, 1e-15);
        close(st.gain, 2.0 / 3.0, 1e-15);
        close(st.sigma_upd, 1.0 / 3.0, 1e-15);
        close(st.x_upd, 1.0 / 3.0, 1e-15);
    }

    #[test]
    fn pure_noise_observation_is_ignored() {
        let prior = Prediction { mean: 0.7, var: 2.0 };
        let st = kalman_update(prior, StageInput { a: 0.0, alpha: 1.0 }, UNIT, EncoderMode::Memoryless, 3.0).unwrap();
        assert_eq!(st.gain, 0.0);
        assert_eq!(st.sigma_upd, 2.0);
        assert_eq!(st.x_upd, 0.7);
    }

    #[test]
    fn side_channel_only_update() {
        let prior = Prediction { mean: 0.0, var: 1.0 };
        let st = kalman_update(prior, StageInput { a: 5.0, alpha: 0.0 }, UNIT, EncoderMode::Memoryless, 2.0).unwrap();
        close(st.gain, 0.5, 1e-15);
        close(st.x_upd, 1.0, 1e-15);
        close(st.sigma_upd, 0.5, 1e-15);
    }

    #[test]
    fn degenerate_observation_rejected() {
        let prior = Prediction { mean: 0.0, var: 0.0 };
        let noise = ChannelNoise { sigma_v2: 0.0, sigma_w2: 1.0 };
        let err = kalman_update(prior, StageInput { a: 1.0, alpha: 1.0 }, noise, EncoderMode::Memoryless, 0.0);
        assert!(matches!(err, Err(Error::DegenerateObservation(_))));
    }

    #[test]
    fn stage_best_response_rows() {
        let r = decoder_stage_best_response(1.0, 1.0, UNIT).unwrap();
        close(r.alpha, 0.5, 1e-15);
        close(r.j_d, 1.0 / 3.0, 1e-15);
        let r = decoder_stage_best_response(1.0, 4.0 / 3.0, UNIT).unwrap();
        close(r.gain, 8.0 / 11.0, 1e-15);
        close(r.j_d, 4.0 / 11.0, 1e-15);
        let noise = ChannelNoise { sigma_v2: 4.0, sigma_w2: 1.0 };
        let r = decoder_stage_best_response(-1.0, 1.0, noise).unwrap();
        assert_eq!(r.alpha, 0.0);
        close(r.gain, 0.5, 1e-15);
        close(r.j_d, 0.5, 1e-15);
        assert!(decoder_stage_best_response(1.0, 0.0, UNIT).is_err());
    }

    #[test]
    fn horizon_one_canonical() {
        let p = MultiStageParams::uniform(1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0 / 9.0, 0.0);
        let rep = multistage_stackelberg(&p).unwrap();
        let s3 = libm::sqrt(3.0);
        close(rep.stages[0].a_sq, 1.0, 1e-12);
        close(rep.stages[0].j_d, 1.0 / 3.0, 1e-12);
        close(rep.stages[0].j_e, 4.0 / 9.0, 1e-12);
        close(rep.stages[1].sigma_pred, 4.0 / 3.0, 1e-12);
        close(rep.stages[1].a_sq, 1.5 * s3 - 1.75, 1e-12);
        close(rep.stages[1].j_d, 2.0 * s3 / 9.0, 1e-12);
        close(rep.j_d_avg, (1.0 / 3.0 + 2.0 * s3 / 9.0) / 2.0, 1e-12);
    }

    #[test]
    fn heavy_penalty_silences_every_stage() {
        let p = MultiStageParams::uniform(1, 0.8, 0.5, 1.0, 1.0, 1.0, 10.0, 0.0);
        let rep = multistage_stackelberg(&p).unwrap();
        assert!(rep.stages.iter().all(|s| s.a == 0.0));
        close(rep.stages[0].j_d, 0.5, 1e-15);
        let s = 0.64 * 0.5 + 0.5;
        close(rep.stages[1].sigma_pred, s, 1e-15);
        close(rep.stages[1].j_d, s / (s + 1.0), 1e-15);
    }

    #[test]
    fn lower_bound_recursions() {
        let p = MultiStageParams::uniform(0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0 / 9.0, 0.0);
        close(multistage_lower_bound(&[1.0], &p).unwrap()[0], 1.0 / 3.0, 1e-15);

        let p = MultiStageParams::uniform(3, 0.9, 0.3, 2.0, 1.5, 0.5, 1.0, 0.0);
        let lb = multistage_lower_bound(&[0.0; 4], &p).unwrap();
        let mut s = 2.0;
        for (t, &b) in lb.iter().enumerate() {
            if t > 0 {
                s = 0.81 * lb[t - 1] + 0.3;
            }
            close(b, s * 0.5 / (s + 0.5), 1e-15);
        }
        assert!(multistage_lower_bound(&[0.0; 3], &p).is_err());
        assert!(multistage_lower_bound(&[0.0, -1.0, 0.0, 0.0], &p).is_err());
    }

    #[test]
    fn run_filter_checks_lengths() {
        let p = MultiStageParams::uniform(1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0 / 9.0, 0.0);
        let inputs = [StageInput { a: 1.0, alpha: 0.5 }];
        assert!(matches!(
            run_filter(&p, &inputs, EncoderMode::Memoryless, &[0.0, 0.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn filter_on_equilibrium_path() {
        let p = MultiStageParams::uniform(1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0 / 9.0, 0.0);
        let rep = multistage_stackelberg(&p).unwrap();
        let traj = run_filter(&p, &rep.inputs(), EncoderMode::Innovations, &[0.3, -1.2]).unwrap();
        close(traj[0].sigma_upd, 1.0 / 3.0, 1e-12);
        close(traj[1].sigma_upd, 2.0 * libm::sqrt(3.0) / 9.0, 1e-12);
        close(traj[1].gain, rep.stages[1].gain, 1e-12);
    }
}
