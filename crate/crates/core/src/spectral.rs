//! Sine eigenbasis of the discrete Dirichlet Laplacian A = -d^2/dx^2:
//! orthonormal transforms, fractional-exponent Sobolev norms, the heat
//! propagator e^{-tA}, operator-norm decay diagnostics and the
//! sup-norm embedding check.
//!
//! The eigenvalues are the *discrete* ones, (4/h^2) sin^2(k pi h / 2), so
//! the spectral s = 1 norm coincides with the grid H1 seminorm to rounding
//! and everything here is exactly consistent with the grid module. The
//! continuum values (k pi)^2 are recovered as h -> 0.

use crate::grid::{Grid, GridFunction};
use std::f64::consts::{PI, SQRT_2};

/// Coefficients against the orthonormal discrete modes sqrt(2) sin(k pi x),
/// k = 1..=n, under the h-weighted inner product.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), grid.n(), "one coefficient per mode");
        SpectralField { grid, coeffs }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Discrete Dirichlet eigenvalue for mode k (1-based):
/// (4/h^2) sin^2(k pi h / 2).
pub fn eigenvalue(grid: Grid, k: usize) -> f64 {
    let h = grid.h();
    let s = (k as f64 * PI * h / 2.0).sin();
    4.0 / (h * h) * s * s
}

/// sin(pi m / (n+1)) for m = 0..2(n+1); sin(k pi i h) is table[(k*i) mod 2(n+1)].
fn sine_table(n: usize) -> Vec<f64> {
    let m = 2 * (n + 1);
    (0..m)
        .map(|j| (PI * j as f64 / (n + 1) as f64).sin())
        .collect()
}

/// Forward sine transform; Parseval holds to rounding.
pub fn to_spectral(u: &GridFunction) -> SpectralField {
    let g = u.grid();
    let n = g.n();
    let table = sine_table(n);
    let m = 2 * (n + 1);
    let scale = g.h() * SQRT_2;
    let v = u.values();
    let coeffs = (1..=n)
        .map(|k| {
            let mut acc = 0.0;
            for (i, vi) in v.iter().enumerate() {
                acc += vi * table[(k * (i + 1)) % m];
            }
            scale * acc
        })
        .collect();
    SpectralField::new(g, coeffs)
}

/// Inverse of [`to_spectral`]; the round trip is the identity to rounding.
pub fn from_spectral(f: &SpectralField) -> GridFunction {
    let g = f.grid();
    let n = g.n();
    let table = sine_table(n);
    let m = 2 * (n + 1);
    let c = f.coeffs();
    let values = (1..=n)
        .map(|i| {
            let mut acc = 0.0;
            for (k, ck) in c.iter().enumerate() {
                acc += ck * table[((k + 1) * i) % m];
            }
            SQRT_2 * acc
        })
        .collect();
    GridFunction::new(g, values).expect("length matches by construction")
}

/// Fractional Sobolev norm (sum_k lambda_k^s c_k^2)^{1/2} on the discrete
/// eigenvalue scale; s = 0 is the L2 norm, s = 1 the H1 seminorm.
pub fn fractional_norm(f: &SpectralField, s: f64) -> f64 {
    assert!((-2.0..=2.0).contains(&s), "exponent s out of [-2, 2]");
    let g = f.grid();
    let total: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| eigenvalue(g, j + 1).powf(s) * c * c)
        .sum();
    total.sqrt()
}

/// Heat propagator: c_k -> e^{-lambda_k t} c_k.
pub fn heat_evolve(f: &SpectralField, t: f64) -> SpectralField {
    assert!(t >= 0.0, "heat evolution requires t >= 0");
    let g = f.grid();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| (-eigenvalue(g, j + 1) * t).exp() * c)
        .collect();
    SpectralField::new(g, coeffs)
}

/// Exact operator norm of e^{-tA} from the s-scale into the sigma-scale on
/// the discrete spectrum: max_k lambda_k^{sigma-s} e^{-lambda_k t}.
pub fn decay_operator_norm(grid: Grid, s: f64, sigma: f64, t: f64) -> f64 {
    assert!(sigma >= s, "need sigma >= s");
    assert!(t > 0.0, "need t > 0");
    let a = sigma - s;
    (1..=grid.n())
        .map(|k| {
            let lam = eigenvalue(grid, k);
            lam.powf(a) * (-lam * t).exp()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug)]
pub struct DecayRow {
    pub t: f64,
    pub exact: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Result of fitting M in the envelope M e^{-omega t} t^{-(sigma-s)} with
/// omega pinned at lambda_1 / 2.
#[derive(Clone, Debug)]
pub struct DecayReport {
    pub s: f64,
    pub sigma: f64,
    pub omega: f64,
    pub fitted_m: f64,
    pub rows: Vec<DecayRow>,
    pub dominates: bool,
}

/// Fits the minimal M over `t_grid` and checks the envelope dominates the
/// exact discrete operator norm at every grid point.
pub fn check_decay_estimate(grid: Grid, s: f64, sigma: f64, t_grid: &[f64]) -> DecayReport {
    let omega = eigenvalue(grid, 1) / 2.0;
    let a = sigma - s;
    let envelope = |t: f64| (-omega * t).exp() * t.powf(-a);
    let fitted_m = t_grid
        .iter()
        .map(|&t| decay_operator_norm(grid, s, sigma, t) / envelope(t))
        .fold(0.0, f64::max);
    let rows: Vec<DecayRow> = t_grid
        .iter()
        .map(|&t| {
            let exact = decay_operator_norm(grid, s, sigma, t);
            let bound = fitted_m * envelope(t);
            DecayRow {
                t,
                exact,
                bound,
                ratio: if bound > 0.0 { exact / bound } else { f64::NAN },
            }
        })
        .collect();
    let dominates = rows
        .iter()
        .all(|r| r.exact <= r.bound * (1.0 + 1e-12));
    DecayReport {
        s,
        sigma,
        omega,
        fitted_m,
        rows,
        dominates,
    }
}

/// Empirical sup-norm embedding constant: the largest ratio
/// max_i |u_i| / (||u||_{H^{-eps}} + ||u'||_{H^{-eps}}) over the samples.
///
/// The derivative norm uses the exact discrete identity
/// ||u'||_{H^{-eps}} = ||u||_{H^{1-eps}} (cell differences of sine modes are
/// cosine modes scaled by sqrt(lambda_k)). Zero samples are skipped.
pub fn embedding_bound_check(samples: &[GridFunction], eps: f64) -> f64 {
    assert!((0.0..0.5).contains(&eps), "eps must lie in [0, 1/2)");
    samples
        .iter()
        .filter_map(|u| {
            let f = to_spectral(u);
            let denom = fractional_norm(&f, -eps) + fractional_norm(&f, 1.0 - eps);
            if denom == 0.0 {
                None
            } else {
                Some(u.linf() / denom)
            }
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mk_grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    #[test]
    fn first_mode_transforms_to_unit_coefficient() {
        let g = mk_grid(64);
        let u = GridFunction::sample(g, |x| SQRT_2 * (PI * x).sin());
        let f = to_spectral(&u);
        assert_abs_diff_eq!(f.coeffs()[0], 1.0, epsilon = 1e-12);
        let tail: f64 = f.coeffs()[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
        assert!(tail < 1e-12, "higher modes leaked: {tail}");
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = mk_grid(97);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let u = grid::random_combination(g, 40, &mut rng);
            let f = to_spectral(&u);
            let back = from_spectral(&f);
            let err = u
                .values()
                .iter()
                .zip(back.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(err < 1e-12, "round trip error {err}");
            let sum_sq: f64 = f.coeffs().iter().map(|c| c * c).sum();
            assert_abs_diff_eq!(grid::l2(&u).powi(2), sum_sq, epsilon = 1e-12);
        }
    }

    #[test]
    fn fractional_norm_recovers_l2_and_h1() {
        let g = mk_grid(128);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = grid::random_combination(g, 30, &mut rng);
        let f = to_spectral(&u);
        assert_abs_diff_eq!(fractional_norm(&f, 0.0), grid::l2(&u), epsilon = 1e-12);
        assert_abs_diff_eq!(fractional_norm(&f, 1.0), grid::h1(&u), epsilon = 1e-10);
    }

    #[test]
    fn single_mode_negative_norm() {
        let g = mk_grid(256);
        let u = GridFunction::sample(g, |x| SQRT_2 * (PI * x).sin());
        let f = to_spectral(&u);
        let lam1 = eigenvalue(g, 1);
        assert_abs_diff_eq!(fractional_norm(&f, -1.0), 1.0 / lam1.sqrt(), epsilon = 1e-10);
        // Discrete eigenvalue is within O(h^2) of pi^2.
        assert_abs_diff_eq!(1.0 / lam1.sqrt(), 1.0 / PI, epsilon = 1e-4);
    }

    #[test]
    fn heat_evolution_identity_and_single_mode() {
        let g = mk_grid(32);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = grid::random_combination(g, 10, &mut rng);
        let f = to_spectral(&u);
        assert_eq!(heat_evolve(&f, 0.0).coeffs(), f.coeffs());

        let mut coeffs = vec![0.0; g.n()];
        coeffs[0] = 1.0;
        let mode = SpectralField::new(g, coeffs);
        let evolved = heat_evolve(&mode, 1.0);
        assert_abs_diff_eq!(
            evolved.coeffs()[0],
            (-eigenvalue(g, 1)).exp(),
            epsilon = 1e-14
        );
    }

    proptest! {
        #[test]
        fn heat_semigroup_additivity(t1 in 0.0f64..0.5, t2 in 0.0f64..0.5, seed in 0u64..100) {
            let g = Grid::new(24).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = grid::random_combination(g, 8, &mut rng);
            let f = to_spectral(&u);
            let a = heat_evolve(&heat_evolve(&f, t1), t2);
            let b = heat_evolve(&f, t1 + t2);
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }

        #[test]
        fn heat_contracts_every_fractional_norm(
            t in 0.0f64..2.0,
            s in -2.0f64..2.0,
            seed in 0u64..100,
        ) {
            let g = Grid::new(24).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = grid::random_combination(g, 8, &mut rng);
            let f = to_spectral(&u);
            let before = fractional_norm(&f, s);
            let after = fractional_norm(&heat_evolve(&f, t), s);
            prop_assert!(after <= before * (1.0 + 1e-12));
        }
    }

    #[test]
    fn operator_norm_equal_orders_decays_at_spectral_gap() {
        let g = mk_grid(64);
        for &t in &[0.02, 0.3, 1.5] {
            assert_abs_diff_eq!(
                decay_operator_norm(g, 0.0, 0.0, t),
                (-eigenvalue(g, 1) * t).exp(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn operator_norm_matches_calculus_sup_for_half_order() {
        // sup_lambda lambda^{1/2} e^{-lambda t} = (2 e t)^{-1/2} when the
        // maximizer 1/(2t) sits inside the discrete spectrum; t must be
        // small enough that eigenvalues are dense near the maximizer.
        let g = mk_grid(512);
        for &t in &[5e-4, 1e-3, 2e-3] {
            let exact = decay_operator_norm(g, 0.0, 0.5, t);
            let calculus = 1.0 / (2.0 * std::f64::consts::E * t).sqrt();
            assert!(
                (exact - calculus).abs() < 0.02 * calculus,
                "t={t}: {exact} vs {calculus}"
            );
        }
    }

    #[test]
    fn operator_norm_monotonicity() {
        let g = mk_grid(48);
        let lam1 = eigenvalue(g, 1);
        let ts: Vec<f64> = (1..40).map(|i| i as f64 * 0.025 / lam1).collect();
        for w in ts.windows(2) {
            assert!(
                decay_operator_norm(g, 0.0, 0.5, w[1])
                    <= decay_operator_norm(g, 0.0, 0.5, w[0]) + 1e-14
            );
        }
        // Non-decreasing in sigma - s for fixed small t.
        let t = 0.5 / lam1;
        let mut prev = decay_operator_norm(g, 0.0, 0.0, t);
        for &a in &[0.25, 0.5, 0.75, 1.0] {
            let cur = decay_operator_norm(g, 0.0, a, t);
            assert!(cur + 1e-14 >= prev, "a={a}");
            prev = cur;
        }
    }

    #[test]
    fn fitted_envelope_dominates() {
        let g = mk_grid(128);
        let t_grid: Vec<f64> = (0..50)
            .map(|i| 1e-3 * (10f64 / 1e-3).powf(i as f64 / 49.0))
            .collect();
        for (s, sigma) in [(0.0, 0.0), (0.0, 0.5), (-0.5, 0.5)] {
            let rep = check_decay_estimate(g, s, sigma, &t_grid);
            assert!(rep.dominates);
            assert!(rep.fitted_m.is_finite() && rep.fitted_m > 0.0);
        }
    }

    #[test]
    fn embedding_skips_zero_and_is_finite_for_modes() {
        let g = mk_grid(64);
        let zero = GridFunction::zeros(g);
        assert_eq!(embedding_bound_check(&[zero], 0.25), 0.0);

        let mode = GridFunction::sample(g, |x| SQRT_2 * (PI * x).sin());
        let c = embedding_bound_check(&[mode], 0.25);
        assert!(c.is_finite() && c > 0.0);
    }

    #[test]
    fn embedding_constant_stable_for_low_mode_under_refinement() {
        let mut prev = None;
        for n in [64, 128, 256] {
            let g = mk_grid(n);
            let mode = GridFunction::sample(g, |x| SQRT_2 * (PI * x).sin());
            let c = embedding_bound_check(&[mode], 0.25);
            if let Some(p) = prev {
                let p: f64 = p;
                assert!((c - p).abs() < 0.05 * p, "jump {p} -> {c}");
            }
            prev = Some(c);
        }
    }

    #[test]
    fn embedding_spike_family_behaviour() {
        // Narrowing normalized hat: bounded ratio at eps = 0.25, slow growth
        // allowed at eps = 0.49.
        let ratio_at = |n: usize, eps: f64| {
            let g = mk_grid(n);
            let mut spike = GridFunction::zeros(g);
            spike.values_mut()[n / 2] = 1.0;
            embedding_bound_check(&[spike], eps)
        };
        let c128 = ratio_at(128, 0.25);
        let c1024 = ratio_at(1024, 0.25);
        assert!(c1024 <= 2.0 * c128, "eps=0.25 grew: {c128} -> {c1024}");
        let d128 = ratio_at(128, 0.49);
        let d1024 = ratio_at(1024, 0.49);
        assert!(d1024 <= 4.0 * d128, "eps=0.49 blew up: {d128} -> {d1024}");
    }
}
