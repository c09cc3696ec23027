//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! Run alone with `cargo test -p siggame --test acceptance`.

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siggame::parallel;
use siggame_core::monte_carlo::{
    brute_force_decoder_oracle, brute_force_encoder_power_oracle, within_standard_errors, DecoderPlan, MultiStagePlan,
};
use siggame_core::multi_stage::{multistage_lower_bound, multistage_stackelberg, riccati, table_optimal_inputs};
use siggame_core::nash::nash_equilibria;
use siggame_core::single_stage::{
    decoder_best_response, estimation_error_lower_bound, stackelberg_equilibrium, stackelberg_slope_sq,
};
use siggame_core::{AffineEncoder, EncoderMode, GameParams, MultiStageParams, NashKind, SimConfig, TableCase};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{name} = {got:e}, expected {want:e} (tol {tol:e})"))
}

fn unit(theta: f64, bias: f64) -> GameParams {
    GameParams::new(1.0, 1.0, 1.0, theta, bias)
}

/// Transmission threshold written out directly.
fn threshold(sx: f64, sv: f64, sw: f64) -> f64 {
    let snr = sx / sw + 1.0;
    sx / (sv * snr * snr)
}

fn random_game(rng: &mut ChaCha8Rng) -> GameParams {
    GameParams::new(
        rng.random_range(0.1..10.0),
        rng.random_range(0.1..10.0),
        rng.random_range(0.1..10.0),
        0.0,
        rng.random_range(-3.0..3.0),
    )
}

/// Golden-section minimiser of a unimodal function on `[lo, hi]`.
fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

fn canonical_stackelberg() -> Check {
    let p = unit(1.0 / 9.0, 0.0);
    for _ in 0..100 {
        stackelberg_equilibrium(&p).map_err(|e| e.to_string())?;
    }
    let start = Instant::now();
    let eq = stackelberg_equilibrium(&p).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let tol = 1e-12;
    close("A", eq.encoder.a, 1.0, tol)?;
    close("C", eq.encoder.c, 0.0, tol)?;
    close("alpha", eq.decoder.alpha, 0.5, tol)?;
    close("K", eq.decoder.k, 2.0 / 3.0, tol)?;
    close("L", eq.decoder.l, 0.0, tol)?;
    close("J_d", eq.j_d, 1.0 / 3.0, tol)?;
    close("J_e", eq.j_e, 4.0 / 9.0, tol)?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("A=1 alpha=1/2 K=2/3 J_d=1/3 J_e=4/9, {elapsed:?}"))
}

fn threshold_behaviour() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut at_threshold = 0;
    let mut worst_edge: f64 = 0.0;
    for i in 0..50 {
        let mut p = random_game(&mut rng);
        let thr = threshold(p.sigma_x2, p.sigma_v2, p.sigma_w2);
        p.theta = if i % 5 == 0 {
            at_threshold += 1;
            thr
        } else {
            thr * rng.random_range(0.2..2.0)
        };
        let eq = stackelberg_equilibrium(&p).map_err(|e| e.to_string())?;
        let silent = eq.encoder.a == 0.0;
        ensure(silent == (p.theta >= thr), || {
            format!("instance {i}: A = {} with theta {} vs threshold {thr}", eq.encoder.a, p.theta)
        })?;
        let below = stackelberg_slope_sq(p.sigma_x2, p.noise(), thr * (1.0 - 1e-9));
        worst_edge = worst_edge.max(below);
        ensure(below < 1e-4, || format!("instance {i}: A^2 = {below:e} just below the threshold"))?;
    }
    Ok(format!("50 instances, {at_threshold} exactly at threshold, max A^2 below edge {worst_edge:.1e}"))
}

fn oracle_agreement() -> Check {
    const STEP: f64 = 1e-4;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut rows = [0usize; 3];
    for i in 0..100 {
        let p = random_game(&mut rng);
        let edge = (p.sigma_v2 / p.sigma_w2).sqrt();
        let (a, row) = match i % 3 {
            0 => (rng.random_range(0.0..5.0), TableCase::Combining),
            1 => (-edge * rng.random_range(0.01..1.0), TableCase::SideChannel),
            _ => (-edge - rng.random_range(0.01..5.0), TableCase::EncoderChannel),
        };
        let c = rng.random_range(-2.0..2.0);
        let resp = decoder_best_response(&AffineEncoder::new(a, c), &p).map_err(|e| e.to_string())?;
        ensure(resp.case == row, || format!("pair {i}: a = {a} landed in {:?}", resp.case))?;
        rows[i % 3] += 1;
        let oracle = brute_force_decoder_oracle(a, c, &p, STEP).map_err(|e| e.to_string())?;
        close(&format!("pair {i} J_d"), resp.j_d, oracle.j_d, 1e-6)?;
        close(&format!("pair {i} alpha"), resp.decoder.alpha, oracle.alpha, STEP)?;
    }
    ensure(rows.iter().all(|&n| n > 0), || format!("row coverage {rows:?}"))?;

    for i in 0..100 {
        let mut p = random_game(&mut rng);
        p.theta = threshold(p.sigma_x2, p.sigma_v2, p.sigma_w2) * rng.random_range(0.05..0.95);
        let eq = stackelberg_equilibrium(&p).map_err(|e| e.to_string())?;
        let power = eq.encoder.a * eq.encoder.a * p.sigma_x2;
        let oracle = brute_force_encoder_power_oracle(&p, 2.0 * power + 1.0, STEP).map_err(|e| e.to_string())?;
        close(&format!("instance {i} power"), power, oracle, 2.0 * STEP)?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("decoder rows {rows:?}, 100 power instances, {elapsed:.2?}"))
}

fn monte_carlo_canonical() -> Check {
    let p = unit(1.0 / 9.0, 0.0);
    let eq = stackelberg_equilibrium(&p).map_err(|e| e.to_string())?;
    let run = |seed: u64| parallel::simulate_single_stage(&eq.encoder, &eq.decoder, &p, &SimConfig::new(1_000_000, seed));
    let start = Instant::now();
    let sim = run(42).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(within_standard_errors(sim.mean_j_d, sim.se_j_d, 1.0 / 3.0, 3.0), || {
        format!("J_d {} +- {}", sim.mean_j_d, sim.se_j_d)
    })?;
    ensure(within_standard_errors(sim.mean_j_e, sim.se_j_e, 4.0 / 9.0, 3.0), || {
        format!("J_e {} +- {}", sim.mean_j_e, sim.se_j_e)
    })?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    let mut passed = 0;
    for seed in 0..20 {
        let s = run(seed).map_err(|e| e.to_string())?;
        if within_standard_errors(s.mean_j_d, s.se_j_d, 1.0 / 3.0, 3.0)
            && within_standard_errors(s.mean_j_e, s.se_j_e, 4.0 / 9.0, 3.0)
        {
            passed += 1;
        }
    }
    ensure(passed >= 19, || format!("only {passed}/20 seeds within 3 se"))?;
    Ok(format!(
        "J_d {:.6} se {:.1e}, J_e {:.6} se {:.1e}, {passed}/20 seeds, {elapsed:.2?}",
        sim.mean_j_d, sim.se_j_d, sim.mean_j_e, sim.se_j_e
    ))
}

fn two_stage_values() -> Check {
    let p = MultiStageParams::uniform(1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0 / 9.0, 0.0);
    let rep = multistage_stackelberg(&p).map_err(|e| e.to_string())?;
    let s3 = 3f64.sqrt();
    let (q0, j0, sigma1) = (1.0, 1.0 / 3.0, 4.0 / 3.0);
    let (q1, j1) = (1.5 * s3 - 1.75, 2.0 * s3 / 9.0);

    // independent numeric minimisation of each stage objective
    let objective = |sp: f64| move |q: f64| sp / ((q + 1.0) * sp + 1.0) + q * sp / 9.0;
    let nq0 = golden_min(0.0, 10.0, objective(1.0));
    let nj0 = 1.0 / (nq0 + 2.0);
    let nsigma1 = nj0 + 1.0;
    let nq1 = golden_min(0.0, 10.0, objective(nsigma1));
    let nj1 = nsigma1 / ((nq1 + 1.0) * nsigma1 + 1.0);
    close("numeric A0^2", nq0, q0, 1e-6)?;
    close("numeric A1^2", nq1, q1, 1e-6)?;
    close("numeric J1", nj1, j1, 1e-6)?;

    let tol = 1e-9;
    let [s0, s1] = rep.stages.as_slice() else {
        return Err(format!("expected 2 stages, got {}", rep.stages.len()));
    };
    close("A0^2", s0.a_sq, q0, tol)?;
    close("J_d0", s0.j_d, j0, tol)?;
    close("Sigma_1|0", s1.sigma_pred, sigma1, tol)?;
    close("A1^2", s1.a_sq, q1, tol)?;
    close("J_d1", s1.j_d, j1, tol)?;
    Ok(format!("A1^2 = {:.12}, J_d1 = {:.12}", s1.a_sq, s1.j_d))
}

fn horizon_zero_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..50 {
        let mut p = random_game(&mut rng);
        p.theta = threshold(p.sigma_x2, p.sigma_v2, p.sigma_w2) * rng.random_range(0.05..1.5);
        let single = stackelberg_equilibrium(&p).map_err(|e| e.to_string())?;
        let multi = multistage_stackelberg(&MultiStageParams::from_single_stage(&p)).map_err(|e| e.to_string())?;
        let s = &multi.stages[0];
        let pairs = [
            ("A", s.a, single.encoder.a),
            ("alpha", s.alpha, single.decoder.alpha),
            ("K", s.gain, single.decoder.k),
            ("J_d", s.j_d, single.j_d),
            ("J_e", s.j_e, single.j_e),
            ("avg J_d", multi.j_d_avg, single.j_d),
            ("avg J_e", multi.j_e_avg, single.j_e),
        ];
        for (name, got, want) in pairs {
            ensure(got.to_bits() == want.to_bits(), || format!("instance {i}: {name} {got:e} != {want:e}"))?;
        }
    }
    Ok("50 instances bit-identical".into())
}

fn encoder_forms_agree() -> Check {
    let p = MultiStageParams::uniform(3, 0.9, 0.5, 1.0, 1.0, 1.0, 1.0 / 9.0, 0.0);
    let slopes = multistage_stackelberg(&p).map_err(|e| e.to_string())?.slopes();
    let run = |mode, seed| {
        let plan = MultiStagePlan { mode, slopes: slopes.clone(), decoder: DecoderPlan::TableOptimal };
        parallel::simulate_multi_stage(&p, &plan, &SimConfig::new(100_000, seed))
    };
    let mem = run(EncoderMode::Memoryless, 7).map_err(|e| e.to_string())?;
    let inn = run(EncoderMode::Innovations, 8).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (t, (a, b)) in mem.stages.iter().zip(&inn.stages).enumerate() {
        let se = a.se_j_d.hypot(b.se_j_d);
        let z = (a.mean_j_d - b.mean_j_d).abs() / se;
        worst = worst.max(z);
        ensure(z <= 3.0, || format!("stage {t}: {} vs {} (se {se:e})", a.mean_j_d, b.mean_j_d))?;
    }
    ensure(mem.stages.len() == 4, || format!("{} stages", mem.stages.len()))?;
    Ok(format!("4 stages, max |z| = {worst:.2}"))
}

fn nash_canonical() -> Check {
    let eqs = nash_equilibria(&unit(1.0 / 9.0, 1.0)).map_err(|e| e.to_string())?;
    ensure(eqs.len() == 3, || format!("{} equilibria", eqs.len()))?;
    let s2 = 2f64.sqrt();
    let tol = 1e-10;
    for eq in &eqs {
        ensure(eq.fixed_point_residual < 1e-9, || format!("{:?} residual {:e}", eq.kind, eq.fixed_point_residual))?;
        let (a, c, alpha, k, l) = match eq.kind {
            NashKind::InformativePositive => (1.0, -3.0, 0.5, 2.0 / 3.0, 1.0),
            NashKind::InformativeNegative => (-s2, 3.0 * s2, 1.0, -s2 / 3.0, 2.0),
            NashKind::NonInformative => (0.0, 0.0, 0.0, 0.5, 0.0),
        };
        let kind = format!("{:?}", eq.kind);
        close(&format!("{kind} A"), eq.encoder.a, a, tol)?;
        close(&format!("{kind} C"), eq.encoder.c, c, tol)?;
        close(&format!("{kind} K"), eq.decoder.k, k, tol)?;
        close(&format!("{kind} L"), eq.decoder.l, l, tol)?;
        if eq.kind != NashKind::NonInformative {
            close(&format!("{kind} alpha"), eq.decoder.alpha, alpha, tol)?;
        }
    }
    let kinds: Vec<NashKind> = eqs.iter().map(|e| e.kind).collect();
    ensure(
        kinds.contains(&NashKind::InformativePositive) && kinds.contains(&NashKind::InformativeNegative),
        || format!("kinds {kinds:?}"),
    )?;
    let high = nash_equilibria(&unit(0.5, 1.0)).map_err(|e| e.to_string())?;
    ensure(high.len() == 1 && high[0].kind == NashKind::NonInformative, || format!("theta = 0.5 gives {high:?}"))?;
    Ok("3 equilibria at theta = 1/9, 1 at theta = 1/2".into())
}

fn lower_bound_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let tol = 1e-12;
    let mut gaps = 0;
    for i in 0..100 {
        let p = random_game(&mut rng);
        let a = rng.random_range(-5.0..5.0);
        let jd = decoder_best_response(&AffineEncoder::new(a, 0.0), &p).map_err(|e| e.to_string())?.j_d;
        let bound = estimation_error_lower_bound(a * a * p.sigma_x2, &p).map_err(|e| e.to_string())?;
        if a >= 0.0 {
            close(&format!("instance {i} bound"), jd, bound, tol)?;
        } else {
            ensure(jd >= bound - tol, || format!("instance {i}: J_d {jd:e} below bound {bound:e}"))?;
            gaps += usize::from(jd > bound + tol);
        }
    }
    for i in 0..100 {
        let n = rng.random_range(1..6);
        let mut p = MultiStageParams::uniform(n, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        p.sigma_x0_2 = rng.random_range(0.1..10.0);
        for t in 0..=n {
            p.sigma_v2[t] = rng.random_range(0.1..10.0);
            p.sigma_w2[t] = rng.random_range(0.1..10.0);
            if t < n {
                p.beta[t] = rng.random_range(-1.5..1.5);
                p.sigma_n2[t] = rng.random_range(0.1..5.0);
            }
        }
        let slopes: Vec<f64> = (0..=n).map(|_| rng.random_range(0.0..4.0)).collect();
        let inputs = table_optimal_inputs(&p, &slopes).map_err(|e| e.to_string())?;
        let traj = riccati(&p, &inputs).map_err(|e| e.to_string())?;
        let powers: Vec<f64> = slopes.iter().zip(&traj).map(|(a, s)| a * a * s.sigma_pred).collect();
        let bounds = multistage_lower_bound(&powers, &p).map_err(|e| e.to_string())?;
        for (t, (s, b)) in traj.iter().zip(&bounds).enumerate() {
            close(&format!("horizon {i} stage {t}"), s.sigma_upd, *b, tol)?;
        }
    }
    Ok(format!("100 single-stage ({gaps} strict gaps for A < 0), 100 multi-stage horizons"))
}

fn byte_identical_output() -> Check {
    let bin = env!("CARGO_BIN_EXE_siggame");
    let game = ["--sigma-x2", "1", "--sigma-v2", "1", "--sigma-w2", "1", "--theta", "0.1111111111111111", "--bias", "1"];
    let runs: [(&str, &[&str]); 6] = [
        ("single-stackelberg", &[]),
        ("nash", &[]),
        ("multi-stackelberg", &["--horizon", "3", "--beta", "0.9", "--sigma-n2", "0.5", "--sigma-x0-2", "1"]),
        ("sweep", &["--param", "theta", "--from", "0.05", "--to", "0.3", "--steps", "10"]),
        ("simulate", &["--samples", "100000", "--seed", "42"]),
        ("simulate", &["--horizon", "2", "--beta", "0.9", "--sigma-n2", "0.5", "--sigma-x0-2", "1", "--samples", "50000"]),
    ];
    let mut compared = 0;
    for (cmd, extra) in runs {
        for format in ["csv", "json"] {
            let mut args = vec![cmd];
            args.extend(game);
            args.extend(extra);
            args.extend(["--format", format]);
            let once = || Command::new(bin).args(&args).output().map_err(|e| e.to_string());
            let (a, b) = (once()?, once()?);
            ensure(a.status.success(), || format!("{cmd} {format}: {}", String::from_utf8_lossy(&a.stderr)))?;
            ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || format!("{cmd} --format {format} differs between runs"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} command/format pairs"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("canonical Stackelberg equilibrium", canonical_stackelberg),
        ("transmission threshold", threshold_behaviour),
        ("brute-force oracles", oracle_agreement),
        ("Monte Carlo at the canonical equilibrium", monte_carlo_canonical),
        ("two-stage equilibrium values", two_stage_values),
        ("horizon 0 equals single stage", horizon_zero_identity),
        ("memoryless and innovations encoders", encoder_forms_agree),
        ("Nash equilibria", nash_canonical),
        ("estimation-error lower bound", lower_bound_properties),
        ("byte-identical machine output", byte_identical_output),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
