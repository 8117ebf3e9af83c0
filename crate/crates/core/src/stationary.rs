//! The stationary set, omega-limit estimates of trajectory ensembles, and
//! the W^{1,inf} regularity reports built on them.
//!
//! Stationary points solve -(|u_x|^{p-2} u_x)_x + f(u) = g. The set is
//! approximated by damped-Newton multistart; omega-limit sets by the
//! terminal states of long integrations, since weak-topology accumulation
//! machinery has no finite-dimensional meaning. The consequences we can
//! measure (convergence to the stationary set, invariance under further
//! flow, uniform slope bounds) are what the reports check.

use crate::dynamics::{self, Scheme, State};
use crate::exec;
use crate::grid::{self, GridFunction};
use crate::model::ModelConfig;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Residual tolerance for an accepted stationary solution.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Solutions closer than this in H1 are considered the same point.
pub const DEDUP_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct StationarySolution {
    pub u: GridFunction,
    pub residual_l2: f64,
    /// How many multistart runs coalesced onto this solution.
    pub basin_hits: u32,
}

/// Residual G(u) = -p_laplacian(u) + f(u) - g of the stationary equation.
pub fn stationary_residual(u: &GridFunction, cfg: &ModelConfig) -> GridFunction {
    let pl = grid::p_laplacian(u, cfg.p);
    let values = u
        .values()
        .iter()
        .zip(pl.values())
        .zip(cfg.forcing.values())
        .map(|((ui, pli), gi)| -pli + cfg.nonlinearity.eval_f(*ui) - gi)
        .collect();
    GridFunction::new(u.grid(), values).expect("same grid")
}

/// Damped Newton on the stationary residual with the regularized
/// p-Laplacian Jacobian plus diag(f'(u)).
pub fn solve_stationary(guess: &GridFunction, cfg: &ModelConfig) -> Result<StationarySolution> {
    const MAX_ITER: u32 = 200;
    let g = guess.grid();
    let n = g.n();
    let mut u = guess.clone();
    let mut r = stationary_residual(&u, cfg);
    let mut rn = grid::l2(&r);

    if rn == 0.0 {
        return Ok(StationarySolution {
            u,
            residual_l2: rn,
            basin_hits: 1,
        });
    }

    // Iterate to the improvement floor rather than stopping at the
    // tolerance: the degenerate operator maps an O(eps) residual to an
    // O(sqrt(eps)) neighborhood in H1, so dedup needs the extra digits.
    for _ in 1..=MAX_ITER {
        let jpl = grid::p_laplacian_jacobian(&u, cfg.p);
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        for i in 0..n {
            diag[i] = -jpl.diag[i] + cfg.nonlinearity.eval_df(u.values()[i]);
        }
        for i in 0..n - 1 {
            off[i] = -jpl.sup[i];
        }
        let jac = crate::tridiag::TriMat::new(off.clone(), diag, off);
        let neg_r: Vec<f64> = r.values().iter().map(|x| -x).collect();
        let mut delta = jac.solve(&neg_r)?;

        let cap = 10.0 * (1.0 + u.linf());
        let dmax = delta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if dmax > cap {
            let sc = cap / dmax;
            for d in delta.iter_mut() {
                *d *= sc;
            }
        }

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand_vals: Vec<f64> = u
                .values()
                .iter()
                .zip(&delta)
                .map(|(a, d)| a + lambda * d)
                .collect();
            let cand = GridFunction::new(g, cand_vals)?;
            let rc = stationary_residual(&cand, cfg);
            let rcn = grid::l2(&rc);
            if rcn.is_finite() && rcn < rn {
                u = cand;
                r = rc;
                rn = rcn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted || rn == 0.0 {
            break;
        }
    }
    if rn < STATIONARY_TOL {
        Ok(StationarySolution {
            u,
            residual_l2: rn,
            basin_hits: 1,
        })
    } else {
        Err(Error::StationaryDiverged {
            residual: rn,
            iterations: MAX_ITER,
        })
    }
}

fn random_guess(cfg: &ModelConfig, rng: &mut impl Rng) -> GridFunction {
    let g = cfg.grid();
    let shape = grid::random_combination(g, 4, rng);
    // Log-uniform amplitudes cover well-separated basins.
    let amp = 10f64.powf(rng.gen_range(-0.5..1.7));
    let h1 = grid::h1(&shape);
    if h1 == 0.0 {
        shape
    } else {
        shape.scaled(amp / h1)
    }
}

/// Multistart approximation of the stationary set. Failed starts are
/// dropped (and logged); duplicates within [`DEDUP_TOL`] in H1 coalesce and
/// bump `basin_hits`. Doubling `n_starts` with the same seed extends the
/// start list, so previously found solutions are never lost.
pub fn enumerate_stationary(cfg: &ModelConfig, n_starts: usize, seed: u64) -> Vec<StationarySolution> {
    assert!(n_starts >= 1, "need at least one start");
    let guesses: Vec<GridFunction> = {
        let mut out = Vec::with_capacity(n_starts);
        // The zero guess first: picks up the trivial solution when present.
        out.push(GridFunction::zeros(cfg.grid()));
        for i in 1..n_starts {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            out.push(random_guess(cfg, &mut rng));
        }
        out
    };
    let runs = exec::map(&guesses, |g| solve_stationary(g, cfg));

    let mut solutions: Vec<StationarySolution> = Vec::new();
    let mut failed = 0usize;
    for run in runs {
        match run {
            Ok(sol) => {
                match solutions
                    .iter_mut()
                    .find(|s| grid::h1(&s.u.sub(&sol.u)) < DEDUP_TOL)
                {
                    Some(existing) => existing.basin_hits += 1,
                    None => solutions.push(sol),
                }
            }
            Err(_) => failed += 1,
        }
    }
    if failed > 0 {
        log::debug!("enumerate_stationary: {failed}/{n_starts} starts failed to converge");
    }
    solutions
}

/// Terminal-state estimate of the omega-limit set of an ensemble.
#[derive(Clone, Debug)]
pub struct OmegaLimitEstimate {
    pub limit_states: Vec<State>,
    /// Min H1 distance from each terminal state to the enumerated
    /// stationary set.
    pub distances_to_n: Vec<f64>,
    /// Sup over members and late times (t >= T/2) of w1inf(u).
    pub sup_w1inf_u: f64,
    /// Same for w1inf(v).
    pub sup_w1inf_v: f64,
    /// Indices of members whose integration failed.
    pub failed_members: Vec<usize>,
}

/// Integrates every ensemble member to `t_long`, keeps terminal states and
/// measures distances to the multistart stationary set.
pub fn omega_limit(
    ensemble: &[State],
    cfg: &ModelConfig,
    t_long: f64,
    scheme: Scheme,
) -> OmegaLimitEstimate {
    let mut run_cfg = cfg.clone();
    run_cfg.t_end = t_long;
    let records = exec::map(ensemble, |s| dynamics::simulate(s, &run_cfg, scheme));

    let stationary = enumerate_stationary(cfg, 12, 0x5eed);

    let mut limit_states = Vec::new();
    let mut distances = Vec::new();
    let mut sup_u: f64 = 0.0;
    let mut sup_v: f64 = 0.0;
    let mut failed = Vec::new();
    for (idx, rec) in records.iter().enumerate() {
        if !rec.converged {
            failed.push(idx);
            continue;
        }
        let fin = rec.final_state().clone();
        let dist = stationary
            .iter()
            .map(|s| grid::h1(&fin.u.sub(&s.u)))
            .fold(f64::INFINITY, f64::min);
        distances.push(dist);
        let t_half = rec.states[0].t + t_long / 2.0;
        for s in rec.states.iter().filter(|s| s.t >= t_half) {
            sup_u = sup_u.max(grid::w1inf(&s.u));
            sup_v = sup_v.max(grid::w1inf(&s.v));
        }
        limit_states.push(fin);
    }
    OmegaLimitEstimate {
        limit_states,
        distances_to_n: distances,
        sup_w1inf_u: sup_u,
        sup_w1inf_v: sup_v,
        failed_members: failed,
    }
}

#[derive(Clone, Debug)]
pub struct RegularityRow {
    pub grid_n: usize,
    pub sup_w1inf_u: f64,
    pub sup_w1inf_v: f64,
}

/// Slope-bound stability across grid refinements. Growth beyond 10% per
/// refinement is flagged as evidence against a uniform discrete
/// W^{1,inf} bound.
#[derive(Clone, Debug)]
pub struct RegularityReport {
    pub rows: Vec<RegularityRow>,
    pub max_drift_u: f64,
    pub flagged: bool,
    /// Set for p >= 4, where no uniform slope bound is expected to hold.
    pub annotation: Option<String>,
}

pub fn attractor_regularity_report(
    estimates: &[(usize, OmegaLimitEstimate)],
    p: f64,
) -> RegularityReport {
    assert!(estimates.len() >= 2, "need at least two refinement levels");
    let rows: Vec<RegularityRow> = estimates
        .iter()
        .map(|(n, e)| RegularityRow {
            grid_n: *n,
            sup_w1inf_u: e.sup_w1inf_u,
            sup_w1inf_v: e.sup_w1inf_v,
        })
        .collect();
    let mut max_drift: f64 = 0.0;
    for w in rows.windows(2) {
        let base = w[0].sup_w1inf_u.max(1e-12);
        max_drift = max_drift.max((w[1].sup_w1inf_u - w[0].sup_w1inf_u).abs() / base);
    }
    let annotation = if p >= 4.0 {
        Some(
            "p >= 4: outside the range where a uniform W^{1,inf} bound on limit states \
             is expected; exploratory data only"
                .to_string(),
        )
    } else {
        None
    };
    RegularityReport {
        rows,
        max_drift_u: max_drift,
        flagged: max_drift > 0.10,
        annotation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::model::{Nonlinearity, PowerTerm};
    use crate::spectral;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn cfg_with(p: f64, nl: Nonlinearity, forcing: GridFunction) -> ModelConfig {
        ModelConfig::for_suite(p, nl, forcing, 0.01, 10.0)
    }

    #[test]
    fn trivial_stationary_point() {
        let g = Grid::new(32).unwrap();
        let cfg = cfg_with(3.0, Nonlinearity::cubic(), GridFunction::zeros(g));
        let sol = solve_stationary(&GridFunction::zeros(g), &cfg).unwrap();
        assert_eq!(sol.residual_l2, 0.0);
        assert_eq!(grid::l2(&sol.u), 0.0);
    }

    #[test]
    fn linear_poisson_oracle() {
        // p=2, f=0, g=sin(pi x): u = g / lambda_1 for the discrete operator,
        // within O(h^2) of sin(pi x)/pi^2.
        let n = 64;
        let g = Grid::new(n).unwrap();
        let forcing = GridFunction::sample(g, |x| (PI * x).sin());
        let cfg = ModelConfig {
            p: 2.0,
            nonlinearity: Nonlinearity::zero(),
            forcing: forcing.clone(),
            grid_n: n,
            dt: 0.01,
            t_end: 1.0,
            newton_tol: 1e-10,
            newton_max_iter: 50,
        };
        let sol = solve_stationary(&GridFunction::zeros(g), &cfg).unwrap();
        let sup_err = (0..n)
            .map(|i| (sol.u.values()[i] - (PI * g.node(i)).sin() / (PI * PI)).abs())
            .fold(0.0f64, f64::max);
        assert!(sup_err < 5.0 * g.h() * g.h(), "sup error {sup_err}");
        // Discrete-exact check against the eigenvalue.
        let lam = spectral::eigenvalue(g, 1);
        let exact = forcing.scaled(1.0 / lam);
        assert!(grid::h1(&sol.u.sub(&exact)) < 1e-9);
    }

    #[test]
    fn constant_forcing_p3_closed_form() {
        // -(|u'|u')' = 1 integrates to flux 1/2 - x, so
        // u(x) = 2/3 ((1/2)^{3/2} - |x - 1/2|^{3/2}).
        let n = 256;
        let g = Grid::new(n).unwrap();
        let forcing = GridFunction::sample(g, |_| 1.0);
        let cfg = cfg_with(3.0, Nonlinearity::zero(), forcing);
        let sol = solve_stationary(&GridFunction::sample(g, |x| 0.2 * (PI * x).sin()), &cfg)
            .unwrap();

        // Quadrature oracle: cumulative Simpson integral of
        // sign(1/2 - s) |1/2 - s|^{1/2} reproduces the closed form.
        let closed = |x: f64| {
            (2.0 / 3.0) * ((0.5f64).powf(1.5) - (x - 0.5).abs().powf(1.5))
        };
        let quad_u_half = {
            let m = 20_000;
            let h = 0.5 / m as f64;
            let fp = |s: f64| (0.5 - s).abs().sqrt() * (0.5 - s).signum();
            let mut acc = fp(0.0) + fp(0.5);
            for i in 1..m {
                acc += fp(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        assert_abs_diff_eq!(quad_u_half, closed(0.5), epsilon = 1e-6);

        let sup_err = (0..n)
            .map(|i| (sol.u.values()[i] - closed(g.node(i))).abs())
            .fold(0.0f64, f64::max);
        assert!(sup_err < 2e-3, "sup error vs closed form: {sup_err}");
    }

    #[test]
    fn monotone_problem_has_unique_stationary_point() {
        let g = Grid::new(48).unwrap();
        let cfg = cfg_with(3.0, Nonlinearity::cubic(), GridFunction::zeros(g));
        let sols = enumerate_stationary(&cfg, 12, 99);
        assert_eq!(sols.len(), 1, "found {} solutions", sols.len());
        assert!(grid::h1(&sols[0].u) < 1e-8);
        assert_eq!(sols[0].basin_hits, 12);
    }

    #[test]
    fn bistable_problem_has_symmetric_pair() {
        // f(s) = s^3 - 30 s: the zero solution plus a symmetric pair.
        let g = Grid::new(48).unwrap();
        let nl = Nonlinearity::from_parts(vec![0.0, -30.0, 0.0, 1.0], vec![]).unwrap();
        let cfg = cfg_with(3.0, nl, GridFunction::zeros(g));
        let sols = enumerate_stationary(&cfg, 24, 7);
        assert!(sols.len() >= 3, "found only {} solutions", sols.len());
        // Symmetry: for every solution, -u is one too.
        for s in &sols {
            let neg = s.u.scaled(-1.0);
            let best = sols
                .iter()
                .map(|t| grid::h1(&t.u.sub(&neg)))
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6, "mirror of a solution missing (dist {best})");
        }
    }

    #[test]
    fn dedup_marks_power_term_duplicates() {
        // Power-term nonlinearity exercising the q < 2 slope floor is not
        // needed here; just confirm dedup over a non-odd f.
        let g = Grid::new(32).unwrap();
        let nl = Nonlinearity::from_parts(
            vec![0.0, 0.0, 0.0, 1.0],
            vec![PowerTerm { coeff: 0.5, exponent: 2.5 }],
        )
        .unwrap();
        let cfg = cfg_with(3.0, nl, GridFunction::zeros(g));
        let few = enumerate_stationary(&cfg, 6, 5);
        let more = enumerate_stationary(&cfg, 12, 5);
        // Doubling starts never removes a previously found solution.
        for s in &few {
            let found = more.iter().any(|t| grid::h1(&t.u.sub(&s.u)) < DEDUP_TOL);
            assert!(found);
        }
    }

    #[test]
    fn stationary_points_are_fixed_points_of_step() {
        let n = 48;
        let g = Grid::new(n).unwrap();
        let forcing = GridFunction::sample(g, |x| (PI * x).sin());
        let cfg = cfg_with(3.0, Nonlinearity::cubic(), forcing);
        let sols = enumerate_stationary(&cfg, 8, 3);
        assert!(!sols.is_empty());
        for s in &sols {
            let init = State::new(s.u.clone(), GridFunction::zeros(g), 0.0);
            let res = dynamics::step(&init, &cfg, Scheme::BackwardEuler).unwrap();
            let drift = grid::h1(&res.state.u.sub(&s.u));
            assert!(drift < 100.0 * cfg.newton_tol, "drift {drift}");
        }
    }

    #[test]
    fn omega_limit_of_stationary_ensemble_is_itself() {
        let g = Grid::new(32).unwrap();
        let forcing = GridFunction::sample(g, |x| (PI * x).sin());
        let cfg = cfg_with(3.0, Nonlinearity::cubic(), forcing);
        let sols = enumerate_stationary(&cfg, 8, 11);
        let ensemble: Vec<State> = sols
            .iter()
            .map(|s| State::new(s.u.clone(), GridFunction::zeros(g), 0.0))
            .collect();
        let est = omega_limit(&ensemble, &cfg, 2.0, Scheme::BackwardEuler);
        assert!(est.failed_members.is_empty());
        for d in &est.distances_to_n {
            assert!(*d < 1e-6, "distance {d}");
        }
        let w_stat = grid::w1inf(&sols[0].u);
        assert_abs_diff_eq!(est.sup_w1inf_u, w_stat, epsilon = 1e-6 * (1.0 + w_stat));
    }

    #[test]
    fn distances_shrink_with_longer_horizon() {
        let g = Grid::new(32).unwrap();
        let forcing = GridFunction::sample(g, |x| (PI * x).sin());
        let cfg = cfg_with(3.0, Nonlinearity::cubic(), forcing);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let ensemble: Vec<State> = (0..4)
            .map(|_| {
                State::new(
                    grid::random_combination(g, 4, &mut rng).scaled(3.0),
                    grid::random_combination(g, 4, &mut rng),
                    0.0,
                )
            })
            .collect();
        let short = omega_limit(&ensemble, &cfg, 10.0, Scheme::BackwardEuler);
        let long = omega_limit(&ensemble, &cfg, 20.0, Scheme::BackwardEuler);
        for (a, b) in short.distances_to_n.iter().zip(&long.distances_to_n) {
            assert!(*b <= *a + 1e-6, "distance rose with horizon: {a} -> {b}");
        }
        // Invariance surrogate: one extra step barely moves the distances.
        let extended = omega_limit(&long.limit_states, &cfg, cfg.dt, Scheme::BackwardEuler);
        for (a, b) in long.distances_to_n.iter().zip(&extended.distances_to_n) {
            assert!((a - b).abs() < 1e-3, "invariance violated: {a} vs {b}");
        }
    }

    #[test]
    fn regularity_report_flags_and_annotates() {
        let g = Grid::new(16).unwrap();
        let mk = |sup: f64| OmegaLimitEstimate {
            limit_states: vec![State::zero(g)],
            distances_to_n: vec![0.0],
            sup_w1inf_u: sup,
            sup_w1inf_v: 0.0,
            failed_members: vec![],
        };
        let stable = attractor_regularity_report(&[(16, mk(1.0)), (32, mk(1.05))], 3.0);
        assert!(!stable.flagged && stable.annotation.is_none());
        let drifting = attractor_regularity_report(&[(16, mk(1.0)), (32, mk(1.3))], 5.0);
        assert!(drifting.flagged);
        assert!(drifting.annotation.is_some());
    }

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
}
