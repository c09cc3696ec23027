//! Seeded simulation of both games and brute-force oracles for the closed
//! forms.
//!
//! # Seeding
//!
//! Samples are grouped into blocks of `block_size` consecutive draws (the last
//! block may be shorter). Block `i` draws from a ChaCha12 generator seeded
//! with `seed_from_u64(seed)` and switched to stream `i`. Block statistics
//! are merged in block order, so the result depends only on
//! `(seed, block_size, n_samples)` and not on which thread ran which block.

mod multi;
mod oracle;
mod single;
mod stats;

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use multi::{
    multi_stage_block, prepare_plan, reduce_multi_stage, simulate_multi_stage, DecoderPlan, MultiStageBlock,
    MultiStagePlan, PreparedStage,
};
pub use oracle::{brute_force_decoder_oracle, brute_force_encoder_power_oracle, OracleDecoder};
pub use single::{
    reduce_single_stage, simulate_single_stage, simulate_single_stage_with, single_stage_block, DecodeRule,
    EncodeRule, SingleStageBlock,
};
pub use stats::Moments;

pub const DEFAULT_BLOCK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_samples: u64,
    pub seed: u64,
    #[serde(default = "default_block_size")]
    pub block_size: u64,
}

fn default_block_size() -> u64 {
    DEFAULT_BLOCK_SIZE
}

impl SimConfig {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            block_size: DEFAULT_BLOCK_SIZE,
        }
    }

    pub fn with_block_size(mut self, block_size: u64) -> Self {
        self.block_size = block_size;
        self
    }

    pub fn validate(&self) -> Result<&Self> {
        if self.n_samples == 0 {
            return Err(Error::InvalidArgument("n_samples must be >= 1".into()));
        }
        if self.block_size == 0 {
            return Err(Error::InvalidArgument("block_size must be >= 1".into()));
        }
        Ok(self)
    }

    pub fn block_count(&self) -> u64 {
        self.n_samples.div_ceil(self.block_size)
    }

    /// Number of samples in block `block`.
    pub fn block_len(&self, block: u64) -> u64 {
        let start = block * self.block_size;
        self.block_size.min(self.n_samples.saturating_sub(start))
    }

    /// Generator for block `block` (stream `block` of the seeded ChaCha12).
    pub fn block_rng(&self, block: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(block);
        rng
    }
}

/// Empirical costs at one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageEstimate {
    pub mean_j_d: f64,
    pub se_j_d: f64,
    pub mean_j_e: f64,
    pub se_j_e: f64,
}

impl StageEstimate {
    fn from_moments(j_d: &Moments, j_e: &Moments) -> Self {
        Self {
            mean_j_d: j_d.mean,
            se_j_d: j_d.std_error(),
            mean_j_e: j_e.mean,
            se_j_e: j_e.std_error(),
        }
    }
}

/// Empirical cost means with standard errors.
///
/// For multi-stage runs the top-level figures are per-trajectory averages over
/// stages and `stages` holds the per-stage breakdown; single-stage runs leave
/// `stages` empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub n_samples: u64,
    pub mean_j_e: f64,
    pub mean_j_d: f64,
    pub se_j_e: f64,
    pub se_j_d: f64,
    pub stages: Vec<StageEstimate>,
}

/// `|empirical - expected| <= sigmas * se`.
pub fn within_standard_errors(empirical: f64, se: f64, expected: f64, sigmas: f64) -> bool {
    (empirical - expected).abs() <= sigmas * se
}
