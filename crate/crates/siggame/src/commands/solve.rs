use siggame_core::monte_carlo::{
    brute_force_decoder_oracle, brute_force_encoder_power_oracle, DecoderPlan, MultiStagePlan,
};
use siggame_core::nash::nash_equilibria;
use siggame_core::single_stage::{evaluate_costs, stackelberg_equilibrium, stackelberg_threshold};
use siggame_core::{multi_stage::multistage_stackelberg, EncoderMode, EquilibriumReport, GameParams, SimConfig};

use super::{checks_table, label, params_json, Check, Outcome, ORACLE_STEP};
use crate::cli::{MultiArgs, NashArgs, SingleArgs, VerifyArgs};
use crate::config::{resolve_game, resolve_multi, ConfigFile};
use crate::error::CliError;
use crate::format::machine;
use crate::parallel;
use crate::report::{Cell, RunReport, Table};

pub fn single_stackelberg(args: &SingleArgs, file: &ConfigFile, echo: &str) -> Result<Outcome, CliError> {
    let p = resolve_game(file, &args.params)?;
    let eq = stackelberg_equilibrium(&p)?;
    let mut report = RunReport::new(echo, params_json(&p));

    let mut t = Table::new(
        "equilibrium",
        "single-stage Stackelberg equilibrium",
        &["A", "C", "alpha", "K", "L", "J_d", "J_e", "power", "case", "transmitting"],
    );
    t.push(vec![
        eq.encoder.a.into(),
        eq.encoder.c.into(),
        eq.decoder.alpha.into(),
        eq.decoder.k.into(),
        eq.decoder.l.into(),
        eq.j_d.into(),
        eq.j_e.into(),
        (eq.encoder.a * eq.encoder.a * p.sigma_x2).into(),
        label(&eq.validity.case).into(),
        if eq.validity.transmitting { "yes" } else { "no" }.into(),
    ]);
    report.tables.push(t);
    if !eq.validity.transmitting {
        report.notes.push(format!(
            "non-transmitting equilibrium: theta >= threshold {}",
            machine(stackelberg_threshold(p.sigma_x2, p.noise()))
        ));
    }

    if !args.verify.verify {
        return Ok(Outcome::ok(report));
    }
    let checks = verify_single(&p, &eq, &args.verify)?;
    Ok(finish_verified(report, checks, args.verify.seed))
}

fn verify_single(p: &GameParams, eq: &EquilibriumReport, v: &VerifyArgs) -> Result<Vec<Check>, CliError> {
    let sim = parallel::simulate_single_stage(&eq.encoder, &eq.decoder, p, &SimConfig::new(v.samples, v.seed))?;
    let oracle = brute_force_decoder_oracle(eq.encoder.a, eq.encoder.c, p, ORACLE_STEP)?;
    let power = eq.encoder.a * eq.encoder.a * p.sigma_x2;
    let found = brute_force_encoder_power_oracle(p, (2.0 * power).max(10.0), ORACLE_STEP)?;
    Ok(vec![
        Check::monte_carlo("mc_J_d", eq.j_d, sim.mean_j_d, sim.se_j_d),
        Check::monte_carlo("mc_J_e", eq.j_e, sim.mean_j_e, sim.se_j_e),
        Check::absolute("oracle_J_d", eq.j_d, oracle.j_d, 1e-6),
        Check::absolute("oracle_alpha", eq.decoder.alpha, oracle.alpha, ORACLE_STEP),
        Check::absolute("oracle_power", power, found, 2.0 * ORACLE_STEP),
    ])
}

fn finish_verified(mut report: RunReport, checks: Vec<Check>, seed: u64) -> Outcome {
    let passed = checks.iter().filter(|c| c.pass).count();
    let verified = passed == checks.len();
    report.tables.push(checks_table(&checks));
    report
        .notes
        .push(format!("verification: {passed}/{} checks passed", checks.len()));
    report.provenance.seed = Some(seed);
    Outcome { report, verified }
}

pub fn multi_stackelberg(args: &MultiArgs, file: &ConfigFile, echo: &str) -> Result<Outcome, CliError> {
    let p = resolve_multi(file, &args.params)?;
    let rep = multistage_stackelberg(&p)?;
    let mut report = RunReport::new(echo, params_json(&p));

    let mut t = Table::new(
        "stages",
        "multi-stage Stackelberg equilibrium",
        &["t", "A", "alpha", "K", "sigma_pred", "J_d", "J_e", "case"],
    );
    for (i, s) in rep.stages.iter().enumerate() {
        t.push(vec![
            Cell::Int(i as u64),
            s.a.into(),
            s.alpha.into(),
            s.gain.into(),
            s.sigma_pred.into(),
            s.j_d.into(),
            s.j_e.into(),
            label(&s.case).into(),
        ]);
    }
    if p.n > 0 {
        t.push(vec![
            "avg".into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            rep.j_d_avg.into(),
            rep.j_e_avg.into(),
            Cell::Empty,
        ]);
    }
    report.tables.push(t);
    let silent: Vec<String> = rep
        .stages
        .iter()
        .enumerate()
        .filter(|(_, s)| s.a_sq == 0.0)
        .map(|(i, _)| i.to_string())
        .collect();
    if !silent.is_empty() {
        report.notes.push(format!("non-transmitting stages: {}", silent.join(", ")));
    }

    if !args.verify.verify {
        return Ok(Outcome::ok(report));
    }
    let plan = MultiStagePlan {
        mode: EncoderMode::Innovations,
        slopes: rep.slopes(),
        decoder: DecoderPlan::TableOptimal,
    };
    let sim = parallel::simulate_multi_stage(&p, &plan, &SimConfig::new(args.verify.samples, args.verify.seed))?;
    let mut checks = Vec::new();
    for (i, (s, e)) in rep.stages.iter().zip(&sim.stages).enumerate() {
        checks.push(Check::monte_carlo(format!("mc_J_d[{i}]"), s.j_d, e.mean_j_d, e.se_j_d));
        checks.push(Check::monte_carlo(format!("mc_J_e[{i}]"), s.j_e, e.mean_j_e, e.se_j_e));
    }
    checks.push(Check::monte_carlo("mc_J_d_avg", rep.j_d_avg, sim.mean_j_d, sim.se_j_d));
    checks.push(Check::monte_carlo("mc_J_e_avg", rep.j_e_avg, sim.mean_j_e, sim.se_j_e));
    Ok(finish_verified(report, checks, args.verify.seed))
}

pub fn nash(args: &NashArgs, file: &ConfigFile, echo: &str) -> Result<Outcome, CliError> {
    let p = resolve_game(file, &args.params)?;
    let eqs = nash_equilibria(&p)?;
    let mut report = RunReport::new(echo, params_json(&p));
    let mut t = Table::new(
        "equilibria",
        "affine Nash equilibria",
        &["kind", "A", "C", "alpha", "K", "L", "J_d", "J_e", "residual"],
    );
    for e in &eqs {
        let costs = evaluate_costs(&e.encoder, &e.decoder, &p);
        t.push(vec![
            label(&e.kind).into(),
            e.encoder.a.into(),
            e.encoder.c.into(),
            e.decoder.alpha.into(),
            e.decoder.k.into(),
            e.decoder.l.into(),
            costs.j_d.into(),
            costs.j_e.into(),
            e.fixed_point_residual.into(),
        ]);
    }
    report.tables.push(t);
    report.notes.push(match eqs.len() {
        1 => "1 equilibrium".to_string(),
        n => format!("{n} equilibria"),
    });
    Ok(Outcome::ok(report))
}
