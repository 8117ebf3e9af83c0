//! Problem data: the nonlinearity f with its closed-form antiderivative,
//! the structural growth check on f, the L^p Poincaré constant of the
//! interval, and the validated run configuration.

use crate::exec;
use crate::grid::{Grid, GridFunction};
use crate::tridiag::TriMat;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Resolution used when an operation needs lambda but none was requested.
pub const DEFAULT_POINCARE_RESOLUTION: usize = 256;

/// One signed-power contribution b |s|^{q-2} s with q > 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

/// Nonlinearity f(s) = sum_j a_j s^j + sum b |s|^{q-2} s. This family covers
/// every example the dynamics needs while keeping the antiderivative in
/// closed form term by term.
#[derive(Clone, Debug, PartialEq)]
pub struct Nonlinearity {
    pub poly_coeffs: Vec<f64>,
    pub power_terms: Vec<PowerTerm>,
}

impl Nonlinearity {
    pub fn zero() -> Self {
        Nonlinearity {
            poly_coeffs: Vec::new(),
            power_terms: Vec::new(),
        }
    }

    /// The default suite nonlinearity f(s) = s^3.
    pub fn cubic() -> Self {
        Nonlinearity {
            poly_coeffs: vec![0.0, 0.0, 0.0, 1.0],
            power_terms: Vec::new(),
        }
    }

    pub fn from_parts(poly_coeffs: Vec<f64>, power_terms: Vec<PowerTerm>) -> Result<Self> {
        for t in &power_terms {
            if !(t.exponent > 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "power term exponent must be > 1, got {}",
                    t.exponent
                )));
            }
            if !t.coeff.is_finite() || !t.exponent.is_finite() {
                return Err(Error::InvalidConfig("non-finite power term".into()));
            }
        }
        if poly_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("non-finite polynomial coefficient".into()));
        }
        Ok(Nonlinearity {
            poly_coeffs,
            power_terms,
        })
    }

    /// f(s).
    pub fn eval_f(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        // Horner on the polynomial part.
        for c in self.poly_coeffs.iter().rev() {
            acc = acc * s + c;
        }
        for t in &self.power_terms {
            if s != 0.0 {
                acc += t.coeff * s.abs().powf(t.exponent - 2.0) * s;
            }
        }
        acc
    }

    /// f'(s). Power terms with q < 2 blow up at s = 0; their slope is
    /// floored there the same way the p-Laplacian Jacobian is.
    pub fn eval_df(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (j, c) in self.poly_coeffs.iter().enumerate().skip(1) {
            acc += c * j as f64 * s.powi(j as i32 - 1);
        }
        for t in &self.power_terms {
            let base = s.abs().max(if t.exponent < 2.0 { crate::grid::EPS_REG } else { 0.0 });
            acc += t.coeff * (t.exponent - 1.0) * base.powf(t.exponent - 2.0);
        }
        acc
    }

    /// Antiderivative F(s) = int_0^s f, term by term; F(0) = 0.
    pub fn eval_potential(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (j, c) in self.poly_coeffs.iter().enumerate() {
            acc += c * s.powi(j as i32 + 1) / (j as f64 + 1.0);
        }
        for t in &self.power_terms {
            acc += t.coeff * s.abs().powf(t.exponent) / t.exponent;
        }
        acc
    }
}

/// Outcome of the structural check on liminf f(s) / (|s|^{p-2} s).
#[derive(Clone, Copy, Debug)]
pub struct GrowthReport {
    pub lambda: f64,
    /// The liminf, +/-infinity allowed.
    pub asymptotic_coefficient: f64,
    pub satisfied: bool,
    /// asymptotic_coefficient + lambda^p (infinite when the liminf is).
    pub margin: f64,
}

/// Evaluates the liminf structurally from the leading terms of the
/// representation, one tail at a time: a polynomial term a s^j switches the
/// sign of its contribution on the negative tail when j is even, while the
/// signed-power terms behave identically on both tails.
fn tail_liminf(nl: &Nonlinearity, p: f64, negative_tail: bool) -> f64 {
    // Collect (exponent, coefficient) pairs for f(s)/(|s|^{p-2} s) ~ c |s|^{e-(p-1)}.
    let mut terms: Vec<(f64, f64)> = Vec::new();
    for (j, &c) in nl.poly_coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let coeff = if negative_tail && j % 2 == 0 { -c } else { c };
        terms.push((j as f64, coeff));
    }
    for t in &nl.power_terms {
        if t.coeff != 0.0 {
            terms.push((t.exponent - 1.0, t.coeff));
        }
    }
    // Merge equal exponents, highest first.
    terms.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (e, c) in terms {
        match merged.last_mut() {
            Some((e0, c0)) if (*e0 - e).abs() <= 1e-12 => *c0 += c,
            _ => merged.push((e, c)),
        }
    }
    let dominant = merged.iter().find(|(_, c)| c.abs() > 1e-300);
    match dominant {
        None => 0.0,
        Some(&(e, c)) => {
            let gap = e - (p - 1.0);
            if gap.abs() <= 1e-9 {
                c
            } else if gap > 0.0 {
                if c > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                0.0
            }
        }
    }
}

/// Checks the sign condition liminf f(s)/(|s|^{p-2} s) > -lambda^p. A
/// structural check on the leading term: sampling cannot certify a liminf,
/// so this is a sufficient criterion over the supported representation.
pub fn check_growth_condition(nl: &Nonlinearity, p: f64) -> Result<GrowthReport> {
    if !(p > 2.0) {
        return Err(Error::InvalidConfig(format!("growth check needs p > 2, got {p}")));
    }
    let lambda = poincare_cached(p, DEFAULT_POINCARE_RESOLUTION)?;
    let liminf = tail_liminf(nl, p, false).min(tail_liminf(nl, p, true));
    let threshold = -lambda.powf(p);
    Ok(GrowthReport {
        lambda,
        asymptotic_coefficient: liminf,
        satisfied: liminf > threshold,
        margin: liminf - threshold,
    })
}

/// Closed-form first L^p Dirichlet eigenvalue of the 1D p-Laplacian
/// quotient, (p-1)^{1/p} 2 pi / (p sin(pi/p)); equals pi at p = 2.
pub fn poincare_closed_form(p: f64) -> f64 {
    (p - 1.0).powf(1.0 / p) * 2.0 * PI / (p * (PI / p).sin())
}

// --- exact piecewise-linear L^p integrals -------------------------------
//
// On a cell where the interpolant runs linearly from a to b, the exact
// integral of |u|^p over the unit reference cell is the chord slope of
// G(s) = |s|^p s / (p+1). Using the exact integral (instead of nodal
// quadrature) makes the discrete quotient the true continuum quotient of
// the interpolant, so minimized values bound lambda from above and
// decrease under refinement.

fn g_prim(s: f64, p: f64) -> f64 {
    s.abs().powf(p) * s / (p + 1.0)
}

/// Integral of |a + (b-a) t|^p over t in [0,1].
fn cell_lp_integral(a: f64, b: f64, p: f64) -> f64 {
    let d = b - a;
    if d.abs() <= 1e-9 * (a.abs() + b.abs() + 1e-30) {
        let m = 0.5 * (a + b);
        m.abs().powf(p)
    } else {
        (g_prim(b, p) - g_prim(a, p)) / d
    }
}

/// d/db of [`cell_lp_integral`].
fn cell_lp_integral_db(a: f64, b: f64, p: f64) -> f64 {
    let d = b - a;
    if d.abs() <= 1e-9 * (a.abs() + b.abs() + 1e-30) {
        let m = 0.5 * (a + b);
        0.5 * p * m.abs().powf(p - 2.0) * m
    } else {
        (b.abs().powf(p) * d - (g_prim(b, p) - g_prim(a, p))) / (d * d)
    }
}

/// d/da of [`cell_lp_integral`] (by the symmetry cell(a,b) = cell(b,a)).
fn cell_lp_integral_da(a: f64, b: f64, p: f64) -> f64 {
    cell_lp_integral_db(b, a, p)
}

/// Numerator^p and denominator^p of the Rayleigh quotient for nodal values
/// `phi`: N_p = sum_c h |s_c|^p (exact for the interpolant) and
/// D_p = exact L^p integral of the interpolant.
fn quotient_parts(phi: &[f64], grid: Grid, p: f64) -> (f64, f64) {
    let n = grid.n();
    let h = grid.h();
    let mut np = 0.0;
    let mut dp = 0.0;
    let mut a = 0.0;
    for i in 0..=n {
        let b = if i < n { phi[i] } else { 0.0 };
        let s = (b - a) / h;
        np += h * s.abs().powf(p);
        dp += h * cell_lp_integral(a, b, p);
        a = b;
    }
    (np, dp)
}

/// Gradient of q = N_p / D_p at `phi`.
fn quotient_grad(phi: &[f64], grid: Grid, p: f64) -> (f64, Vec<f64>) {
    let n = grid.n();
    let h = grid.h();
    let (np, dp) = quotient_parts(phi, grid, p);
    let q = np / dp;
    let mut grad = vec![0.0; n];
    for i in 0..n {
        let left = if i == 0 { 0.0 } else { phi[i - 1] };
        let right = if i + 1 == n { 0.0 } else { phi[i + 1] };
        let s_l = (phi[i] - left) / h;
        let s_r = (right - phi[i]) / h;
        let dnp = p * (crate::grid::flux(s_l, p) - crate::grid::flux(s_r, p));
        let ddp = h * (cell_lp_integral_db(left, phi[i], p) + cell_lp_integral_da(phi[i], right, p));
        grad[i] = (dnp - q * ddp) / dp;
    }
    (q, grad)
}

/// Projected gradient descent on the quotient from one random positive
/// start. Returns (quotient^p ratio root, minimizer) or the stall error.
fn minimize_quotient(grid: Grid, p: f64, seed: u64) -> Result<(f64, Vec<f64>)> {
    const MAX_ITER: u32 = 50_000;
    let n = grid.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi: Vec<f64> = (0..n).map(|_| 0.1 + 0.9 * rng.gen::<f64>()).collect();

    let normalize = |phi: &mut [f64]| {
        let (_, dp) = quotient_parts(phi, grid, p);
        let scale = dp.powf(1.0 / p);
        for v in phi.iter_mut() {
            *v /= scale;
        }
    };
    normalize(&mut phi);

    let (mut q, mut grad) = quotient_grad(&phi, grid, p);
    let mut eta = 0.05 / (1.0 + grad.iter().map(|g| g * g).sum::<f64>().sqrt());
    let mut prev_phi: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut stable = 0u32;

    for it in 0..MAX_ITER {
        // Barzilai-Borwein step from the previous iterate when available.
        if let Some((ph, gr)) = &prev_phi {
            let mut sy = 0.0;
            let mut yy = 0.0;
            for i in 0..n {
                let si = phi[i] - ph[i];
                let yi = grad[i] - gr[i];
                sy += si * yi;
                yy += yi * yi;
            }
            if yy > 0.0 && sy.abs() > 1e-300 {
                eta = (sy / yy).abs().clamp(1e-12, 10.0);
            }
        }

        let mut accepted = false;
        let mut step = eta;
        for _ in 0..40 {
            let mut cand: Vec<f64> = phi.iter().zip(&grad).map(|(v, g)| v - step * g).collect();
            normalize(&mut cand);
            let (qc, gc) = quotient_grad(&cand, grid, p);
            if qc.is_finite() && qc < q {
                prev_phi = Some((phi, grad));
                phi = cand;
                let dq = q - qc;
                q = qc;
                grad = gc;
                accepted = true;
                if dq <= 1e-13 * q.abs() {
                    stable += 1;
                } else {
                    stable = 0;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No descent direction left at line-search resolution.
            stable += 3;
        }
        if stable >= 3 {
            return Ok((q.powf(1.0 / p), phi));
        }
        if it + 1 == MAX_ITER {
            return Err(Error::MinimizerStalled {
                last_quotient: q.powf(1.0 / p),
                iterations: MAX_ITER,
                last_iterate: phi,
            });
        }
    }
    unreachable!()
}

/// Consistent-mass inverse iteration for the p = 2 case: smallest
/// generalized eigenvalue of (K0, M0) on the piecewise-linear space.
fn poincare_p2(grid: Grid) -> (f64, Vec<f64>) {
    let n = grid.n();
    let k0 = TriMat::new(vec![-1.0; n - 1], vec![2.0; n], vec![-1.0; n - 1]);
    let m0 = TriMat::new(
        vec![1.0 / 6.0; n - 1],
        vec![4.0 / 6.0; n],
        vec![1.0 / 6.0; n - 1],
    );
    let mut x = vec![1.0; n];
    let mut mu = 0.0;
    for _ in 0..500 {
        let rhs = m0.matvec(&x);
        let mut y = k0.solve(&rhs).expect("K0 is SPD");
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in y.iter_mut() {
            *v /= norm;
        }
        let num: f64 = y.iter().zip(k0.matvec(&y)).map(|(a, b)| a * b).sum();
        let den: f64 = y.iter().zip(m0.matvec(&y)).map(|(a, b)| a * b).sum();
        let mu_new = num / den;
        let done = (mu_new - mu).abs() <= 1e-15 * mu_new;
        x = y;
        mu = mu_new;
        if done {
            break;
        }
    }
    (mu.sqrt() / grid.h(), x)
}

/// Minimized discrete Rayleigh quotient inf ||phi'||_p / ||phi||_p over
/// nonzero Dirichlet grid functions: a direct symmetric eigensolve at p = 2,
/// projected gradient descent with 10 restarts otherwise. The value is an
/// upper bound on the continuum constant, converging from above under
/// refinement.
pub fn poincare_constant(p: f64, resolution: usize) -> Result<f64> {
    Ok(poincare_minimizer(p, resolution)?.0)
}

/// Same as [`poincare_constant`] but also returns the minimizing profile.
pub fn poincare_minimizer(p: f64, resolution: usize) -> Result<(f64, GridFunction)> {
    if !(p > 1.0) {
        return Err(Error::InvalidConfig(format!("poincare needs p > 1, got {p}")));
    }
    if resolution < 32 {
        return Err(Error::InvalidConfig(format!(
            "poincare resolution must be >= 32, got {resolution}"
        )));
    }
    let grid = Grid::new(resolution)?;
    if (p - 2.0).abs() < 1e-12 {
        let (lam, x) = poincare_p2(grid);
        return Ok((lam, GridFunction::new(grid, x)?));
    }
    let seeds: Vec<u64> = (0..10).map(|i| 0x9E37 + i as u64).collect();
    let runs = exec::map(&seeds, |&s| minimize_quotient(grid, p, s));
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut last_err = None;
    for r in runs {
        match r {
            Ok((q, phi)) => {
                if best.as_ref().map_or(true, |(b, _)| q < *b) {
                    best = Some((q, phi));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some((q, phi)) => Ok((q, GridFunction::new(grid, phi)?)),
        None => Err(last_err.expect("at least one restart ran")),
    }
}

/// Memoized lambda for the growth warning on hot paths (ensembles call
/// simulate repeatedly with the same p).
pub(crate) fn poincare_cached(p: f64, resolution: usize) -> Result<f64> {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (p.to_bits(), resolution);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let v = poincare_constant(p, resolution)?;
    cache.lock().unwrap().insert(key, v);
    Ok(v)
}

/// Validated problem and run parameters.
#[derive(Clone, Debug)]
pub struct ModelConfig {
    pub p: f64,
    pub nonlinearity: Nonlinearity,
    /// Samples of the forcing g on the interior nodes.
    pub forcing: GridFunction,
    pub grid_n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub newton_tol: f64,
    pub newton_max_iter: u32,
}

impl ModelConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: f64,
        nonlinearity: Nonlinearity,
        forcing: GridFunction,
        grid_n: usize,
        dt: f64,
        t_end: f64,
        newton_tol: f64,
        newton_max_iter: u32,
    ) -> Result<Self> {
        let cfg = ModelConfig {
            p,
            nonlinearity,
            forcing,
            grid_n,
            dt,
            t_end,
            newton_tol,
            newton_max_iter,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 2.0) {
            return Err(Error::InvalidConfig(format!("p must be > 2, got {}", self.p)));
        }
        if self.grid_n < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid_n must be >= 2, got {}",
                self.grid_n
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.t_end < self.dt {
            return Err(Error::InvalidConfig(format!(
                "t_end must be >= dt, got t_end = {}, dt = {}",
                self.t_end, self.dt
            )));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "newton_tol must be > 0, got {}",
                self.newton_tol
            )));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidConfig("newton_max_iter must be >= 1".into()));
        }
        if self.forcing.grid().n() != self.grid_n {
            return Err(Error::InvalidConfig(format!(
                "forcing sampled on {} nodes but grid_n = {}",
                self.forcing.grid().n(),
                self.grid_n
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        self.forcing.grid()
    }

    /// Convenience constructor used by tests and the verification battery.
    pub fn for_suite(p: f64, nonlinearity: Nonlinearity, forcing: GridFunction, dt: f64, t_end: f64) -> Self {
        let grid_n = forcing.grid().n();
        ModelConfig {
            p,
            nonlinearity,
            forcing,
            grid_n,
            dt,
            t_end,
            newton_tol: 1e-10,
            newton_max_iter: 50,
        }
    }
}
