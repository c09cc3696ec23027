use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{Moments, SimConfig, SimResult};
use crate::error::Result;
use crate::params::{AffineDecoder, AffineEncoder, GameParams};

/// Encoder mapping from source sample to message.
pub trait EncodeRule {
    fn encode(&self, x: f64) -> f64;
}

/// Decoder: a combining ratio and an estimator acting on the combined input.
pub trait DecodeRule {
    fn alpha(&self) -> f64;
    fn decode(&self, r: f64) -> f64;
}

impl EncodeRule for AffineEncoder {
    #[inline]
    fn encode(&self, x: f64) -> f64 {
        AffineEncoder::encode(self, x)
    }
}

impl DecodeRule for AffineDecoder {
    #[inline]
    fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    fn decode(&self, r: f64) -> f64 {
        AffineDecoder::decode(self, r)
    }
}

impl<F: Fn(f64) -> f64> EncodeRule for F {
    #[inline]
    fn encode(&self, x: f64) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SingleStageBlock {
    pub j_e: Moments,
    pub j_d: Moments,
}

/// Simulates block `block` of a single-stage run.
///
/// Each sample draws `x`, `v`, `w` in that order from standard normals scaled
/// by the configured standard deviations.
pub fn single_stage_block<E: EncodeRule, D: DecodeRule>(
    enc: &E,
    dec: &D,
    p: &GameParams,
    cfg: &SimConfig,
    block: u64,
) -> SingleStageBlock {
    let mut rng = cfg.block_rng(block);
    let sd_x = libm::sqrt(p.sigma_x2);
    let sd_v = libm::sqrt(p.sigma_v2);
    let sd_w = libm::sqrt(p.sigma_w2);
    let alpha = dec.alpha();
    let mut out = SingleStageBlock::default();
    for _ in 0..cfg.block_len(block) {
        let x = sd_x * rng.sample::<f64, _>(StandardNormal);
        let v = sd_v * rng.sample::<f64, _>(StandardNormal);
        let w = sd_w * rng.sample::<f64, _>(StandardNormal);
        let m = enc.encode(x);
        let r = alpha * (m + v) + (1.0 - alpha) * (x + w);
        let err = x - dec.decode(r);
        out.j_d.push(err * err);
        let biased = err - p.bias;
        out.j_e.push(biased * biased + p.theta * m * m);
    }
    out
}

/// Merges block statistics in iteration order.
pub fn reduce_single_stage(blocks: impl IntoIterator<Item = SingleStageBlock>) -> SimResult {
    let mut j_e = Moments::default();
    let mut j_d = Moments::default();
    for b in blocks {
        j_e.merge(&b.j_e);
        j_d.merge(&b.j_d);
    }
    SimResult {
        n_samples: j_d.count,
        mean_j_e: j_e.mean,
        mean_j_d: j_d.mean,
        se_j_e: j_e.std_error(),
        se_j_d: j_d.std_error(),
        stages: Vec::new(),
    }
}

/// Serial single-stage simulation with arbitrary strategies.
pub fn simulate_single_stage_with<E: EncodeRule, D: DecodeRule>(
    enc: &E,
    dec: &D,
    p: &GameParams,
    cfg: &SimConfig,
) -> Result<SimResult> {
    p.validate()?;
    cfg.validate()?;
    Ok(reduce_single_stage(
        (0..cfg.block_count()).map(|b| single_stage_block(enc, dec, p, cfg, b)),
    ))
}

/// Serial single-stage simulation of an affine strategy pair.
pub fn simulate_single_stage(
    enc: &AffineEncoder,
    dec: &AffineDecoder,
    p: &GameParams,
    cfg: &SimConfig,
) -> Result<SimResult> {
    enc.validate()?;
    dec.validate()?;
    simulate_single_stage_with(enc, dec, p, cfg)
}
