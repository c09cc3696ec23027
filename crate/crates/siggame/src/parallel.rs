//! Rayon runners for the core simulator.
//!
//! Blocks run on the thread pool and are reduced in block order, so the
//! results are bit-identical to the serial functions in `siggame_core`.

use rayon::prelude::*;
use siggame_core::monte_carlo::{
    multi_stage_block, prepare_plan, reduce_multi_stage, reduce_single_stage, single_stage_block, DecodeRule,
    EncodeRule, MultiStagePlan,
};
use siggame_core::{AffineDecoder, AffineEncoder, GameParams, MultiStageParams, Result, SimConfig, SimResult};

pub fn simulate_single_stage_with<E, D>(enc: &E, dec: &D, p: &GameParams, cfg: &SimConfig) -> Result<SimResult>
where
    E: EncodeRule + Sync,
    D: DecodeRule + Sync,
{
    p.validate()?;
    cfg.validate()?;
    let blocks: Vec<_> = (0..cfg.block_count())
        .into_par_iter()
        .map(|b| single_stage_block(enc, dec, p, cfg, b))
        .collect();
    Ok(reduce_single_stage(blocks))
}

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

pub fn simulate_multi_stage(p: &MultiStageParams, plan: &MultiStagePlan, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let stages = prepare_plan(p, plan)?;
    let blocks: Vec<_> = (0..cfg.block_count())
        .into_par_iter()
        .map(|b| multi_stage_block(p, plan.mode, &stages, cfg, b))
        .collect();
    Ok(reduce_multi_stage(blocks))
}
