//! Subcommand implementations: each validates its inputs, runs the core
//! operation, writes CSV artifacts plus a manifest, and returns the exit
//! status.

use crate::config::RunConfig;
use plap_core::checks::{self, SuiteParams};
use plap_core::dynamics::{self, Scheme, State};
use plap_core::grid::{self, Grid, GridFunction};
use plap_core::model;
use plap_core::odebound;
use plap_core::spectral;
use plap_core::stationary;
use plap_core::{io, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_BAD_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// Options shared by every subcommand.
pub struct Context {
    pub out: PathBuf,
    pub seed: u64,
    pub scheme: Scheme,
    pub threads: usize,
    pub override_growth_check: bool,
    pub config_path: Option<PathBuf>,
    pub started: Instant,
}

impl Context {
    fn manifest(&self, command: &str, cfg: Option<&RunConfig>, extra: &[(String, String)]) -> Vec<(String, String)> {
        let mut entries = vec![
            ("command".to_string(), command.to_string()),
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("scheme".to_string(), self.scheme.tag().to_string()),
            ("threads".to_string(), self.threads.to_string()),
            (
                "config".to_string(),
                self.config_path
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| "<defaults>".to_string()),
            ),
        ];
        if let Some(cfg) = cfg {
            for (k, v) in &cfg.echo {
                entries.push((format!("config.{k}"), v.clone()));
            }
        }
        entries.extend_from_slice(extra);
        let wall_ms = self.started.elapsed().as_millis();
        entries.push(("wall_ms".to_string(), wall_ms.to_string()));
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_else(|_| "0".to_string());
        entries.push(("unix_time".to_string(), stamp));
        entries
    }

    fn write_manifest(&self, command: &str, cfg: Option<&RunConfig>, extra: &[(String, String)]) -> plap_core::Result<()> {
        io::write_manifest(&self.out.join("manifest.txt"), &self.manifest(command, cfg, extra))
    }
}

fn exit_for(err: &Error) -> u8 {
    if err.is_config_error() {
        EXIT_BAD_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

/// Growth-condition gate shared by the model-driven commands.
fn gate_growth(ctx: &Context, cfg: &RunConfig) -> Result<(), u8> {
    match model::check_growth_condition(&cfg.model.nonlinearity, cfg.model.p) {
        Ok(rep) if rep.satisfied => Ok(()),
        Ok(rep) => {
            if ctx.override_growth_check {
                log::warn!(
                    "growth condition fails (liminf {} <= -lambda^p = {}); proceeding under --override-growth-check",
                    rep.asymptotic_coefficient,
                    -rep.lambda.powf(cfg.model.p)
                );
                Ok(())
            } else {
                eprintln!(
                    "error: the nonlinearity violates the growth condition \
                     (liminf f(s)/(|s|^{{p-2}}s) = {} <= -lambda^p = {}); \
                     pass --override-growth-check to run anyway",
                    rep.asymptotic_coefficient,
                    -rep.lambda.powf(cfg.model.p)
                );
                Err(EXIT_BAD_CONFIG)
            }
        }
        Err(e) => {
            eprintln!("error: growth condition check failed: {e}");
            Err(exit_for(&e))
        }
    }
}

pub fn simulate(ctx: &Context, cfg: &RunConfig) -> u8 {
    if let Err(code) = gate_growth(ctx, cfg) {
        return code;
    }
    let init = cfg.initial_state();
    let rec = dynamics::simulate(&init, &cfg.model, ctx.scheme);

    let result = (|| -> plap_core::Result<()> {
        io::write_trajectory_csv(&ctx.out.join("trajectory.csv"), &rec, ctx.seed)?;
        io::write_ledger_csv(&ctx.out.join("ledger.csv"), &rec.ledger, ctx.seed)?;
        io::write_grid_function_csv(&ctx.out.join("forcing.csv"), &cfg.model.forcing, ctx.seed)?;
        let extra = vec![
            ("converged".to_string(), rec.converged.to_string()),
            ("steps".to_string(), rec.newton_iterations.len().to_string()),
            (
                "failure".to_string(),
                rec.failure.clone().unwrap_or_else(|| "none".to_string()),
            ),
        ];
        ctx.write_manifest("simulate", Some(cfg), &extra)?;
        Ok(())
    })();
    if let Err(e) = result {
        eprintln!("error: {e}");
        return exit_for(&e);
    }
    if !rec.converged {
        eprintln!(
            "error: integration stopped early: {}",
            rec.failure.as_deref().unwrap_or("unknown")
        );
        return EXIT_NUMERICAL;
    }
    println!(
        "simulate: {} steps to t = {}, final E = {}",
        rec.newton_iterations.len(),
        rec.final_state().t,
        rec.ledger.e_values().last().unwrap()
    );
    EXIT_OK
}

pub fn stationary_cmd(ctx: &Context, cfg: &RunConfig, starts: usize) -> u8 {
    if let Err(code) = gate_growth(ctx, cfg) {
        return code;
    }
    let sols = stationary::enumerate_stationary(&cfg.model, starts, ctx.seed);
    let result = (|| -> plap_core::Result<()> {
        io::write_stationary_csv(
            &ctx.out.join("stationary_summary.csv"),
            &ctx.out.join("stationary_profiles.csv"),
            &sols,
            ctx.seed,
        )?;
        ctx.write_manifest(
            "stationary",
            Some(cfg),
            &[
                ("starts".to_string(), starts.to_string()),
                ("solutions".to_string(), sols.len().to_string()),
            ],
        )?;
        Ok(())
    })();
    if let Err(e) = result {
        eprintln!("error: {e}");
        return exit_for(&e);
    }
    println!("stationary: {} distinct solutions from {} starts", sols.len(), starts);
    for (i, s) in sols.iter().enumerate() {
        println!(
            "  solution {i}: residual {:.3e}, basin hits {}, h1 {:.6}",
            s.residual_l2,
            s.basin_hits,
            grid::h1(&s.u)
        );
    }
    EXIT_OK
}

fn build_ensemble(cfg: &RunConfig, members: usize, amplitude: f64, seed: u64) -> Vec<State> {
    let g = cfg.model.grid();
    (0..members)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let shape_u = grid::random_combination(g, 5, &mut rng);
            let hu = grid::h1(&shape_u).max(1e-12);
            let shape_v = grid::random_combination(g, 5, &mut rng);
            let lv = grid::l2(&shape_v).max(1e-12);
            let a = rng.gen_range(0.2 * amplitude..=amplitude);
            State::new(shape_u.scaled(a / hu), shape_v.scaled(a / (3.0 * lv)), 0.0)
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn omega_limit(
    ctx: &Context,
    cfg: &RunConfig,
    members: usize,
    t_long: f64,
    amplitude: f64,
    refine: bool,
) -> u8 {
    if let Err(code) = gate_growth(ctx, cfg) {
        return code;
    }
    let ensemble = build_ensemble(cfg, members, amplitude, ctx.seed);
    let est = stationary::omega_limit(&ensemble, &cfg.model, t_long, ctx.scheme);

    let result = (|| -> plap_core::Result<()> {
        let mut body = format!("# seed={}\nmember,distance_to_N,w1inf_u_final\n", ctx.seed);
        for (i, (d, s)) in est
            .distances_to_n
            .iter()
            .zip(&est.limit_states)
            .enumerate()
        {
            body.push_str(&format!("{i},{d},{}\n", grid::w1inf(&s.u)));
        }
        std::fs::create_dir_all(&ctx.out)?;
        std::fs::write(ctx.out.join("omega_summary.csv"), body)?;
        Ok(())
    })();
    if let Err(e) = result {
        eprintln!("error: {e}");
        return exit_for(&e);
    }

    println!(
        "omega-limit: {} members to T = {t_long}; sup w1inf(u) = {:.6}, sup w1inf(v) = {:.6}",
        members, est.sup_w1inf_u, est.sup_w1inf_v
    );
    if !est.failed_members.is_empty() {
        eprintln!("error: members {:?} failed to integrate", est.failed_members);
        return EXIT_NUMERICAL;
    }

    let mut extra = vec![
        ("members".to_string(), members.to_string()),
        ("t_long".to_string(), t_long.to_string()),
        ("amplitude".to_string(), amplitude.to_string()),
        ("sup_w1inf_u".to_string(), est.sup_w1inf_u.to_string()),
        ("sup_w1inf_v".to_string(), est.sup_w1inf_v.to_string()),
    ];

    if refine {
        let base_n = cfg.model.grid_n;
        let mut per_grid = vec![(base_n, est)];
        for factor in [2usize, 4] {
            let n = base_n * factor;
            let model = match cfg.resampled(n) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_BAD_CONFIG;
                }
            };
            let run_cfg = RunConfig {
                model,
                g_expr: cfg.g_expr.clone(),
                u0_expr: cfg.u0_expr.clone(),
                v0_expr: cfg.v0_expr.clone(),
                echo: cfg.echo.clone(),
            };
            let ens = build_ensemble(&run_cfg, members, amplitude, ctx.seed);
            let e = stationary::omega_limit(&ens, &run_cfg.model, t_long, ctx.scheme);
            if !e.failed_members.is_empty() {
                eprintln!("error: refinement n={n}: members {:?} failed", e.failed_members);
                return EXIT_NUMERICAL;
            }
            per_grid.push((n, e));
        }
        let report = stationary::attractor_regularity_report(&per_grid, cfg.model.p);
        if let Err(e) = io::write_regularity_csv(&ctx.out.join("regularity.csv"), &report, ctx.seed)
        {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
        println!(
            "refinement drift in sup w1inf(u): {:.2}% ({})",
            report.max_drift_u * 100.0,
            if report.flagged { "FLAGGED" } else { "stable" }
        );
        if let Some(note) = &report.annotation {
            println!("note: {note}");
        }
        extra.push(("max_drift_u".to_string(), report.max_drift_u.to_string()));
        extra.push(("drift_flagged".to_string(), report.flagged.to_string()));
    }

    if let Err(e) = ctx.write_manifest("omega-limit", Some(cfg), &extra) {
        eprintln!("error: {e}");
        return exit_for(&e);
    }
    EXIT_OK
}

pub fn poincare(ctx: &Context, p: f64, resolution: usize) -> u8 {
    match model::poincare_minimizer(p, resolution) {
        Ok((lambda, minimizer)) => {
            println!("poincare p={p} resolution={resolution} lambda={lambda}");
            let result = (|| -> plap_core::Result<()> {
                io::write_grid_function_csv(&ctx.out.join("poincare_minimizer.csv"), &minimizer, ctx.seed)?;
                ctx.write_manifest(
                    "poincare",
                    None,
                    &[
                        ("p".to_string(), p.to_string()),
                        ("resolution".to_string(), resolution.to_string()),
                        ("lambda".to_string(), lambda.to_string()),
                    ],
                )?;
                Ok(())
            })();
            if let Err(e) = result {
                eprintln!("error: {e}");
                return exit_for(&e);
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

pub fn verify_decay(ctx: &Context, n: usize) -> u8 {
    let grid = match Grid::new(n) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_CONFIG;
        }
    };
    let t_grid: Vec<f64> = (0..50)
        .map(|i| 1e-3 * (10f64 / 1e-3).powf(i as f64 / 49.0))
        .collect();
    let mut all_dominate = true;
    let mut extra = Vec::new();
    for (s, sigma) in [(0.0, 0.0), (0.0, 0.5), (-0.5, 0.5)] {
        let rep = spectral::check_decay_estimate(grid, s, sigma, &t_grid);
        all_dominate &= rep.dominates;
        println!(
            "decay (s={s}, sigma={sigma}): fitted M = {:.6}, omega = {:.6}, dominates = {}",
            rep.fitted_m, rep.omega, rep.dominates
        );
        let name = format!("decay_s{s}_sigma{sigma}.csv");
        if let Err(e) = io::write_decay_csv(&ctx.out.join(name), &rep, ctx.seed) {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
        extra.push((format!("fitted_M_s{s}_sigma{sigma}"), rep.fitted_m.to_string()));
    }
    extra.push(("n".to_string(), n.to_string()));
    if let Err(e) = ctx.write_manifest("verify-decay", None, &extra) {
        eprintln!("error: {e}");
        return exit_for(&e);
    }
    if all_dominate {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

pub fn verify_embedding(ctx: &Context, epsilon: f64) -> u8 {
    if !(0.0..0.5).contains(&epsilon) {
        eprintln!("error: epsilon must lie in [0, 1/2), got {epsilon}");
        return EXIT_BAD_CONFIG;
    }
    let ns = [128usize, 256, 512, 1024];
    let mut rows = Vec::new();
    for &n in &ns {
        let g = Grid::new(n).unwrap();
        let mut family: Vec<GridFunction> = [1usize, 2, 5]
            .iter()
            .map(|&k| GridFunction::sample(g, |x| (k as f64 * std::f64::consts::PI * x).sin()))
            .collect();
        let mut spike = GridFunction::zeros(g);
        spike.values_mut()[n / 2] = 1.0;
        family.push(spike);
        let c = spectral::embedding_bound_check(&family, epsilon);
        println!("embedding eps={epsilon} n={n}: constant {c:.6}");
        rows.push((n, c));
    }
    let growth = rows.last().unwrap().1 / rows.first().unwrap().1;
    println!("growth factor n=128 -> 1024: {growth:.3}");

    let result = (|| -> plap_core::Result<()> {
        let mut body = format!("# seed={}\nn,constant\n", ctx.seed);
        for (n, c) in &rows {
            body.push_str(&format!("{n},{c}\n"));
        }
        std::fs::create_dir_all(&ctx.out)?;
        std::fs::write(ctx.out.join("embedding.csv"), body)?;
        ctx.write_manifest(
            "verify-embedding",
            None,
            &[
                ("epsilon".to_string(), epsilon.to_string()),
                ("growth_factor".to_string(), growth.to_string()),
            ],
        )?;
        Ok(())
    })();
    if let Err(e) = result {
        eprintln!("error: {e}");
        return exit_for(&e);
    }
    if growth < 2.0 {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

pub fn verify_lemma_a2(ctx: &Context, cases: usize, dt: f64) -> u8 {
    if !(dt > 0.0 && dt <= 1e-2) {
        eprintln!("error: dt must lie in (0, 1e-2], got {dt}");
        return EXIT_BAD_CONFIG;
    }
    let rows = odebound::run_campaign(cases, ctx.seed, dt);
    let violations = rows.iter().filter(|r| !r.pass).count();
    let result = (|| -> plap_core::Result<()> {
        io::write_campaign_csv(&ctx.out.join("lemma_campaign.csv"), &rows, ctx.seed)?;
        ctx.write_manifest(
            "verify-lemma-a2",
            None,
            &[
                ("cases".to_string(), cases.to_string()),
                ("dt".to_string(), dt.to_string()),
                ("violations".to_string(), violations.to_string()),
            ],
        )?;
        Ok(())
    })();
    if let Err(e) = result {
        eprintln!("error: {e}");
        return exit_for(&e);
    }
    println!("lemma-a2 campaign: {cases} cases, {violations} violations");
    if violations == 0 {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

pub fn suite(ctx: &Context, campaign_cases: usize) -> u8 {
    let params = SuiteParams {
        seed: ctx.seed,
        campaign_cases,
    };
    let outcomes = checks::run_all(&params, Some(&ctx.out));
    let mut body = format!("# seed={}\nid,name,passed,detail\n", ctx.seed);
    for o in &outcomes {
        println!("{}", o.line());
        body.push_str(&format!("{},{},{},\"{}\"\n", o.id, o.name, o.passed, o.detail));
    }
    let all_pass = outcomes.iter().all(|o| o.passed);
    let result = (|| -> plap_core::Result<()> {
        std::fs::create_dir_all(&ctx.out)?;
        std::fs::write(ctx.out.join("suite_summary.csv"), body)?;
        ctx.write_manifest(
            "suite",
            None,
            &[
                ("campaign_cases".to_string(), campaign_cases.to_string()),
                ("all_pass".to_string(), all_pass.to_string()),
            ],
        )?;
        Ok(())
    })();
    if let Err(e) = result {
        eprintln!("error: {e}");
        return exit_for(&e);
    }
    println!(
        "suite: {}/{} criteria passed",
        outcomes.iter().filter(|o| o.passed).count(),
        outcomes.len()
    );
    if all_pass {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}
