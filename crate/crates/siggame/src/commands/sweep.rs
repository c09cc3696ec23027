use serde_json::json;
use siggame_core::nash::nash_equilibria;
use siggame_core::single_stage::stackelberg_equilibrium;
use siggame_core::GameParams;

use super::{params_json, Outcome};
use crate::cli::{ParamArgs, SweepArgs, SweepParam};
use crate::config::{resolve_game, ConfigFile};
use crate::error::CliError;
use crate::report::{Cell, RunReport, Table};

fn set_flag(flags: &mut ParamArgs, param: SweepParam, v: f64) {
    match param {
        SweepParam::SigmaX2 => flags.sigma_x2 = Some(v),
        SweepParam::SigmaV2 => flags.sigma_v2 = vec![v],
        SweepParam::SigmaW2 => flags.sigma_w2 = vec![v],
        SweepParam::Theta => flags.theta = vec![v],
        SweepParam::Bias => flags.bias = vec![v],
    }
}

fn with_param(p: GameParams, param: SweepParam, v: f64) -> GameParams {
    match param {
        SweepParam::SigmaX2 => GameParams { sigma_x2: v, ..p },
        SweepParam::SigmaV2 => GameParams { sigma_v2: v, ..p },
        SweepParam::SigmaW2 => GameParams { sigma_w2: v, ..p },
        SweepParam::Theta => GameParams { theta: v, ..p },
        SweepParam::Bias => GameParams { bias: v, ..p },
    }
}

/// Grid point `i` of `steps` equal intervals; the last point is `to` exactly.
pub fn grid_point(from: f64, to: f64, steps: u64, i: u64) -> f64 {
    if i == steps {
        to
    } else {
        from + (to - from) * (i as f64 / steps as f64)
    }
}

pub fn sweep(args: &SweepArgs, file: &ConfigFile, echo: &str) -> Result<Outcome, CliError> {
    if args.steps == 0 {
        return Err(CliError::Config("`steps` must be >= 1 (got 0)".into()));
    }
    if !args.from.is_finite() || !args.to.is_finite() {
        return Err(CliError::Config("sweep bounds `from` and `to` must be finite".into()));
    }
    let key = args.param.key();
    let mut flags = args.params.clone();
    set_flag(&mut flags, args.param, args.from);
    let base = resolve_game(file, &flags)?;

    let mut t = Table::new("sweep", &format!("{key} sweep"), &[key, "A", "alpha", "K", "L", "J_d", "J_e", "nash_count"]);
    for i in 0..=args.steps {
        let v = grid_point(args.from, args.to, args.steps, i);
        let p = with_param(base, args.param, v);
        p.validate()?;
        let eq = stackelberg_equilibrium(&p)?;
        let count = nash_equilibria(&p)?.len();
        t.push(vec![
            v.into(),
            eq.encoder.a.into(),
            eq.decoder.alpha.into(),
            eq.decoder.k.into(),
            eq.decoder.l.into(),
            eq.j_d.into(),
            eq.j_e.into(),
            Cell::Int(count as u64),
        ]);
    }
    let mut report = RunReport::new(echo, sweep_parameters(&base, key, args.from, args.to, args.steps));
    report.tables.push(t);
    Ok(Outcome::ok(report))
}

fn sweep_parameters(base: &GameParams, key: &str, from: f64, to: f64, steps: u64) -> serde_json::Value {
    let mut fixed = params_json(base);
    if let Some(m) = fixed.as_object_mut() {
        m.shift_remove(key);
    }
    json!({ "sweep": { "param": key, "from": from, "to": to, "steps": steps }, "fixed": fixed })
}
