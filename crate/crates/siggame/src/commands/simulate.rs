use serde_json::json;
use siggame_core::monte_carlo::{prepare_plan, within_standard_errors, DecoderPlan, MultiStagePlan, DEFAULT_BLOCK_SIZE};
use siggame_core::multi_stage::{analytic_stage_costs, multistage_stackelberg};
use siggame_core::single_stage::{decoder_best_response, evaluate_costs, stackelberg_equilibrium};
use siggame_core::{AffineDecoder, AffineEncoder, EncoderMode, SimConfig};

use super::{params_json, verdict, z_score, Outcome, SIGMAS};
use crate::cli::{SimulateArgs, StrategySource};
use crate::config::{resolve_game, resolve_multi, ConfigFile};
use crate::error::CliError;
use crate::parallel;
use crate::report::{Cell, RunReport, Table};

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;

/// Single-stage unless a horizon is given by flag or a `[multi_stage]`
/// section is present.
pub fn simulate(args: &SimulateArgs, file: &ConfigFile, echo: &str) -> Result<Outcome, CliError> {
    let sec = file.simulation.clone().unwrap_or_default();
    let cfg = SimConfig {
        n_samples: args.samples.or(sec.samples).unwrap_or(DEFAULT_SAMPLES),
        seed: args.seed.or(sec.seed).unwrap_or(DEFAULT_SEED),
        block_size: args.block_size.or(sec.block_size).unwrap_or(DEFAULT_BLOCK_SIZE),
    };
    cfg.validate()?;
    let mode = args.mode.map(EncoderMode::from).or(sec.mode).unwrap_or_default();
    let mut outcome = if args.params.horizon.is_some() || file.multi_stage.is_some() {
        simulate_multi(args, file, echo, &cfg, mode)?
    } else {
        simulate_single(args, file, echo, &cfg)?
    };
    outcome.report.provenance.seed = Some(cfg.seed);
    Ok(outcome)
}

fn comparison_columns(multi: bool) -> Vec<&'static str> {
    let mut cols = vec!["quantity", "analytic", "empirical", "se", "z", "verdict"];
    if multi {
        cols.insert(0, "stage");
    }
    cols
}

fn comparison_row(quantity: &str, analytic: f64, empirical: f64, se: f64) -> (Vec<Cell>, bool) {
    let pass = within_standard_errors(empirical, se, analytic, SIGMAS);
    (
        vec![
            quantity.into(),
            analytic.into(),
            empirical.into(),
            se.into(),
            z_score(empirical, analytic, se),
            verdict(pass).into(),
        ],
        pass,
    )
}

fn verdict_note(all_pass: bool, n_samples: u64) -> String {
    format!(
        "verdict: {} (every empirical mean within {SIGMAS} standard errors, {n_samples} samples)",
        verdict(all_pass)
    )
}

fn simulate_single(args: &SimulateArgs, file: &ConfigFile, echo: &str, cfg: &SimConfig) -> Result<Outcome, CliError> {
    let p = resolve_game(file, &args.params)?;
    let (enc, dec) = match args.strategy {
        StrategySource::Equilibrium => {
            let eq = stackelberg_equilibrium(&p)?;
            (eq.encoder, eq.decoder)
        }
        StrategySource::Explicit => {
            let s = file.strategy.clone().unwrap_or_default();
            let a = args.a.or(s.a).ok_or_else(|| {
                CliError::Config("missing required parameter `a` (set [strategy].a or --a)".into())
            })?;
            let enc = AffineEncoder::new(a, args.c.or(s.c).unwrap_or(0.0));
            let dec = match (args.k.or(s.k), args.l.or(s.l), args.alpha.or(s.alpha)) {
                (Some(k), Some(l), Some(alpha)) => AffineDecoder::new(k, l, alpha),
                (None, None, None) => decoder_best_response(&enc, &p)?.decoder,
                _ => {
                    return Err(CliError::Config(
                        "explicit decoder needs all of `k`, `l`, `alpha` (or none for the best response)".into(),
                    ))
                }
            };
            enc.validate()?;
            dec.validate()?;
            (enc, dec)
        }
    };
    let analytic = evaluate_costs(&enc, &dec, &p);
    let sim = parallel::simulate_single_stage(&enc, &dec, &p, cfg)?;

    let mut report = RunReport::new(
        echo,
        json!({ "game": params_json(&p), "simulation": params_json(cfg), "encoder": params_json(&enc), "decoder": params_json(&dec) }),
    );
    let mut strat = Table::new("strategy", "strategy", &["A", "C", "alpha", "K", "L"]);
    strat.push(vec![enc.a.into(), enc.c.into(), dec.alpha.into(), dec.k.into(), dec.l.into()]);
    report.tables.push(strat);

    let mut t = Table::new("comparison", "empirical vs analytic costs", &comparison_columns(false));
    let (row_d, pass_d) = comparison_row("J_d", analytic.j_d, sim.mean_j_d, sim.se_j_d);
    let (row_e, pass_e) = comparison_row("J_e", analytic.j_e, sim.mean_j_e, sim.se_j_e);
    t.push(row_d);
    t.push(row_e);
    report.tables.push(t);
    report.notes.push(verdict_note(pass_d && pass_e, sim.n_samples));
    Ok(Outcome::ok(report))
}

fn simulate_multi(
    args: &SimulateArgs,
    file: &ConfigFile,
    echo: &str,
    cfg: &SimConfig,
    mode: EncoderMode,
) -> Result<Outcome, CliError> {
    let p = resolve_multi(file, &args.params)?;
    let plan = match args.strategy {
        StrategySource::Equilibrium => MultiStagePlan {
            mode,
            slopes: multistage_stackelberg(&p)?.slopes(),
            decoder: DecoderPlan::TableOptimal,
        },
        StrategySource::Explicit => {
            let s = file.strategy.clone().unwrap_or_default();
            let pick = |flag: &[f64], file: Option<Vec<f64>>| if flag.is_empty() { file } else { Some(flag.to_vec()) };
            let slopes = pick(&args.slopes, s.slopes).ok_or_else(|| {
                CliError::Config("missing required parameter `slopes` (set [strategy].slopes or --slopes)".into())
            })?;
            let decoder = pick(&args.alphas, s.alphas).map_or(DecoderPlan::TableOptimal, |alpha| DecoderPlan::Kalman { alpha });
            MultiStagePlan { mode, slopes, decoder }
        }
    };
    let stages = prepare_plan(&p, &plan)?;
    let inputs: Vec<_> = stages.iter().map(|s| s.input).collect();
    let analytic = analytic_stage_costs(&p, &inputs, mode)?;
    let sim = parallel::simulate_multi_stage(&p, &plan, cfg)?;

    let mut report = RunReport::new(
        echo,
        json!({ "multi_stage": params_json(&p), "simulation": params_json(cfg), "plan": params_json(&plan) }),
    );
    let mut strat = Table::new("strategy", "per-stage strategy", &["t", "A", "alpha", "K"]);
    for (i, s) in stages.iter().enumerate() {
        strat.push(vec![Cell::Int(i as u64), s.input.a.into(), s.input.alpha.into(), s.gain.into()]);
    }
    report.tables.push(strat);

    let mut t = Table::new("comparison", "empirical vs analytic costs per stage", &comparison_columns(true));
    let mut all_pass = true;
    let mut push = |stage: Cell, q: &str, a: f64, e: f64, se: f64| {
        let (mut row, pass) = comparison_row(q, a, e, se);
        row.insert(0, stage);
        t.push(row);
        all_pass &= pass;
    };
    for (i, (c, e)) in analytic.iter().zip(&sim.stages).enumerate() {
        push(Cell::Int(i as u64), "J_d", c.j_d, e.mean_j_d, e.se_j_d);
        push(Cell::Int(i as u64), "J_e", c.j_e, e.mean_j_e, e.se_j_e);
    }
    let h = analytic.len() as f64;
    let avg_d = analytic.iter().map(|c| c.j_d).sum::<f64>() / h;
    let avg_e = analytic.iter().map(|c| c.j_e).sum::<f64>() / h;
    push("avg".into(), "J_d", avg_d, sim.mean_j_d, sim.se_j_d);
    push("avg".into(), "J_e", avg_e, sim.mean_j_e, sim.se_j_e);
    report.tables.push(t);
    report.notes.push(verdict_note(all_pass, sim.n_samples));
    Ok(Outcome::ok(report))
}
