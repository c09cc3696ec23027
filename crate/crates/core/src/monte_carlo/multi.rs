use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Moments, SimConfig, SimResult, StageEstimate};
use crate::error::{Error, Result};
use crate::multi_stage::{riccati, table_optimal_inputs, EncoderMode, StageInput};
use crate::params::MultiStageParams;

/// How the simulated decoder picks its combining ratios and gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DecoderPlan {
    /// Optimal ratio at every stage, Kalman gains.
    TableOptimal,
    /// Given ratios, Kalman gains.
    Kalman { alpha: Vec<f64> },
    /// Given ratios and gains.
    Fixed { alpha: Vec<f64>, gain: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStagePlan {
    pub mode: EncoderMode,
    /// Encoder slopes `a_t`, one per stage.
    pub slopes: Vec<f64>,
    pub decoder: DecoderPlan,
}

/// Resolved per-stage strategy used inside the sampling loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreparedStage {
    pub input: StageInput,
    pub gain: f64,
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { what, expected, got })
    }
}

fn check_alpha(alpha: &[f64]) -> Result<()> {
    match alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        Some(bad) => Err(Error::InvalidArgument(alloc::format!("alpha must be in [0, 1] (got {bad})"))),
        None => Ok(()),
    }
}

/// Resolves ratios and gains for every stage. Gains do not depend on the
/// observations, so they are computed once up front.
pub fn prepare_plan(p: &MultiStageParams, plan: &MultiStagePlan) -> Result<Vec<PreparedStage>> {
    p.validate()?;
    check_len("slopes", p.stages(), plan.slopes.len())?;
    if let Some(bad) = plan.slopes.iter().find(|a| !a.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!("slope must be finite (got {bad})")));
    }
    let inputs: Vec<StageInput> = match &plan.decoder {
        DecoderPlan::TableOptimal => table_optimal_inputs(p, &plan.slopes)?,
        DecoderPlan::Kalman { alpha } | DecoderPlan::Fixed { alpha, .. } => {
            check_len("alpha", p.stages(), alpha.len())?;
            check_alpha(alpha)?;
            plan.slopes
                .iter()
                .zip(alpha)
                .map(|(&a, &alpha)| StageInput { a, alpha })
                .collect()
        }
    };
    let gains: Vec<f64> = match &plan.decoder {
        DecoderPlan::Fixed { gain, .. } => {
            check_len("gain", p.stages(), gain.len())?;
            gain.clone()
        }
        _ => riccati(p, &inputs)?.iter().map(|s| s.gain).collect(),
    };
    Ok(inputs
        .into_iter()
        .zip(gains)
        .map(|(input, gain)| PreparedStage { input, gain })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiStageBlock {
    pub stage_j_d: Vec<Moments>,
    pub stage_j_e: Vec<Moments>,
    /// Per-trajectory stage averages.
    pub avg_j_d: Moments,
    pub avg_j_e: Moments,
}

/// Simulates block `block` of a multi-stage run.
///
/// Each trajectory draws `x_0`, then for every stage `v_t`, `w_t` and (before
/// the last stage) the process noise `n_t`, in that order.
pub fn multi_stage_block(
    p: &MultiStageParams,
    mode: EncoderMode,
    stages: &[PreparedStage],
    cfg: &SimConfig,
    block: u64,
) -> MultiStageBlock {
    let mut rng = cfg.block_rng(block);
    let horizon = p.stages();
    let inv_h = 1.0 / horizon as f64;
    let sd_v: Vec<f64> = p.sigma_v2.iter().map(|&s| libm::sqrt(s)).collect();
    let sd_w: Vec<f64> = p.sigma_w2.iter().map(|&s| libm::sqrt(s)).collect();
    let sd_n: Vec<f64> = p.sigma_n2.iter().map(|&s| libm::sqrt(s)).collect();
    let mut out = MultiStageBlock {
        stage_j_d: alloc::vec![Moments::default(); horizon],
        stage_j_e: alloc::vec![Moments::default(); horizon],
        ..Default::default()
    };
    for _ in 0..cfg.block_len(block) {
        let mut x = libm::sqrt(p.sigma_x0_2) * rng.sample::<f64, _>(StandardNormal);
        let mut x_upd = 0.0;
        let mut sum_d = 0.0;
        let mut sum_e = 0.0;
        for (t, st) in stages.iter().enumerate() {
            let x_pred = if t == 0 { 0.0 } else { p.beta[t - 1] * x_upd };
            let v = sd_v[t] * rng.sample::<f64, _>(StandardNormal);
            let w = sd_w[t] * rng.sample::<f64, _>(StandardNormal);
            let m = match mode {
                EncoderMode::Memoryless => st.input.a * x,
                EncoderMode::Innovations => st.input.a * (x - x_pred),
            };
            let alpha = st.input.alpha;
            let r = alpha * (m + v) + (1.0 - alpha) * (x + w);
            x_upd = x_pred + st.gain * (r - st.input.predicted_observation(x_pred, mode));
            let err = x - x_upd;
            let d = err * err;
            let biased = err - p.bias[t];
            let e = biased * biased + p.theta[t] * m * m;
            out.stage_j_d[t].push(d);
            out.stage_j_e[t].push(e);
            sum_d += d;
            sum_e += e;
            if t < p.n {
                x = p.beta[t] * x + sd_n[t] * rng.sample::<f64, _>(StandardNormal);
            }
        }
        out.avg_j_d.push(sum_d * inv_h);
        out.avg_j_e.push(sum_e * inv_h);
    }
    out
}

/// Merges block statistics in iteration order.
pub fn reduce_multi_stage(blocks: impl IntoIterator<Item = MultiStageBlock>) -> SimResult {
    let mut acc = MultiStageBlock::default();
    for b in blocks {
        if acc.stage_j_d.is_empty() {
            acc.stage_j_d = alloc::vec![Moments::default(); b.stage_j_d.len()];
            acc.stage_j_e = alloc::vec![Moments::default(); b.stage_j_e.len()];
        }
        for (a, s) in acc.stage_j_d.iter_mut().zip(&b.stage_j_d) {
            a.merge(s);
        }
        for (a, s) in acc.stage_j_e.iter_mut().zip(&b.stage_j_e) {
            a.merge(s);
        }
        acc.avg_j_d.merge(&b.avg_j_d);
        acc.avg_j_e.merge(&b.avg_j_e);
    }
    SimResult {
        n_samples: acc.avg_j_d.count,
        mean_j_e: acc.avg_j_e.mean,
        mean_j_d: acc.avg_j_d.mean,
        se_j_e: acc.avg_j_e.std_error(),
        se_j_d: acc.avg_j_d.std_error(),
        stages: acc
            .stage_j_d
            .iter()
            .zip(&acc.stage_j_e)
            .map(|(d, e)| StageEstimate::from_moments(d, e))
            .collect(),
    }
}

/// Serial multi-stage simulation; `n_samples` counts trajectories.
pub fn simulate_multi_stage(p: &MultiStageParams, plan: &MultiStagePlan, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let stages = prepare_plan(p, plan)?;
    Ok(reduce_multi_stage(
        (0..cfg.block_count()).map(|b| multi_stage_block(p, plan.mode, &stages, cfg, b)),
    ))
}
