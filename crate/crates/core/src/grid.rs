//! Uniform Dirichlet grid on (0,1): difference operators, the discrete
//! p-Laplacian with its tridiagonal linearization, and the discrete norms
//! used throughout the crate.
//!
//! Interior nodes sit at x_i = i*h, i = 1..=n, with h = 1/(n+1); both
//! boundary values are implicitly zero. Slopes live on the n+1 cells
//! between consecutive nodes (ghost boundaries included), which keeps the
//! flux form of the operator and the summation-by-parts identity
//!
//! ```text
//! h * sum_i (p_laplacian u)_i v_i  ==  -h * sum_cells phi(s^u_c) s^v_c
//! ```
//!
//! exact in floating point up to rounding.

use crate::tridiag::TriMat;
use crate::{Error, Result};
use rand::Rng;

/// Slope-degeneracy floor used inside Jacobian weights only. The residual
/// of the discrete equation is never regularized.
pub const EPS_REG: f64 = 1e-8;

/// Uniform grid of `n` interior nodes on (0,1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid needs at least 2 interior nodes, got {n}"
            )));
        }
        Ok(Grid {
            n,
            h: 1.0 / (n as f64 + 1.0),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// x-coordinate of interior node `i` (0-based), i.e. (i+1)*h.
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 1.0) * self.h
    }
}

/// Nodal values of a function on a [`Grid`] with zero Dirichlet boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidData(format!(
                "grid function has {} values but the grid has {} interior nodes",
                values.len(),
                grid.n()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction {
            grid,
            values: vec![0.0; grid.n()],
        }
    }

    /// Samples `f` at the interior nodes.
    pub fn sample(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n()).map(|i| f(grid.node(i))).collect();
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add_scaled(&self, other: &Self, c: f64) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    /// h-weighted inner product, the discrete L2 pairing.
    pub fn dot_h(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        s * self.grid.h()
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// phi(s) = |s|^{p-2} s, the flux nonlinearity of the p-Laplacian.
pub fn flux(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.abs().powf(p - 2.0) * s
    }
}

/// Cell slopes (u_{i+1} - u_i)/h including the two boundary cells; length n+1.
pub fn forward_diff(u: &GridFunction) -> Vec<f64> {
    let n = u.grid().n();
    let h = u.grid().h();
    let v = u.values();
    let mut s = vec![0.0; n + 1];
    s[0] = v[0] / h;
    for c in 1..n {
        s[c] = (v[c] - v[c - 1]) / h;
    }
    s[n] = -v[n - 1] / h;
    s
}

/// Conservative discrete p-Laplacian: node i gets
/// (phi(s_{i+1/2}) - phi(s_{i-1/2})) / h. Reduces to the standard 3-point
/// Laplacian at p = 2.
pub fn p_laplacian(u: &GridFunction, p: f64) -> GridFunction {
    let n = u.grid().n();
    let h = u.grid().h();
    let s = forward_diff(u);
    let mut out = vec![0.0; n];
    let mut left = flux(s[0], p);
    for (i, o) in out.iter_mut().enumerate() {
        let right = flux(s[i + 1], p);
        *o = (right - left) / h;
        left = right;
    }
    GridFunction {
        grid: u.grid(),
        values: out,
    }
}

/// Tridiagonal Jacobian of [`p_laplacian`] with cell weights
/// w_c = (p-1) * max(|s_c|, EPS_REG)^{p-2}. Symmetric; exact Jacobian up to
/// the degeneracy floor.
pub fn p_laplacian_jacobian(u: &GridFunction, p: f64) -> TriMat {
    let n = u.grid().n();
    let h = u.grid().h();
    let h2 = h * h;
    let s = forward_diff(u);
    let w: Vec<f64> = s
        .iter()
        .map(|&sc| (p - 1.0) * sc.abs().max(EPS_REG).powf(p - 2.0))
        .collect();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for i in 0..n {
        diag[i] = -(w[i] + w[i + 1]) / h2;
    }
    for (i, o) in off.iter_mut().enumerate() {
        *o = w[i + 1] / h2;
    }
    TriMat::new(off.clone(), diag, off)
}

/// The gap (phi(x) - phi(y))(x - y) - c_p |x-y|^p with c_p = 2^{2-p}.
/// Nonnegative for every x, y and p > 2; equality at (1, -1).
pub fn monotonicity_gap(x: f64, y: f64, p: f64) -> f64 {
    let c_p = 2f64.powf(2.0 - p);
    (flux(x, p) - flux(y, p)) * (x - y) - c_p * (x - y).abs().powf(p)
}

/// Discrete L2 norm (h sum u_i^2)^{1/2}.
pub fn l2(u: &GridFunction) -> f64 {
    u.dot_h(u).sqrt()
}

/// Gradient p-norm (h sum_cells |s_c|^p)^{1/p}.
pub fn lp_grad(u: &GridFunction, p: f64) -> f64 {
    let h = u.grid().h();
    let s = forward_diff(u);
    let total: f64 = s.iter().map(|sc| sc.abs().powf(p)).sum();
    (h * total).powf(1.0 / p)
}

/// H1 seminorm, i.e. [`lp_grad`] with p = 2.
pub fn h1(u: &GridFunction) -> f64 {
    let h = u.grid().h();
    let s = forward_diff(u);
    let total: f64 = s.iter().map(|sc| sc * sc).sum();
    (h * total).sqrt()
}

/// Sup norm of the cell slopes, the discrete W^{1,inf} seminorm.
pub fn w1inf(u: &GridFunction) -> f64 {
    forward_diff(u).iter().fold(0.0, |m, s| m.max(s.abs()))
}

/// SPD discrete Dirichlet Laplacian K with stencil (-1, 2, -1)/h^2.
pub fn dirichlet_laplacian(grid: Grid) -> TriMat {
    let n = grid.n();
    let h2 = grid.h() * grid.h();
    TriMat::new(
        vec![-1.0 / h2; n - 1],
        vec![2.0 / h2; n],
        vec![-1.0 / h2; n - 1],
    )
}

/// Negative-order norm (h u^T K^{-1} u)^{1/2} realized by one tridiagonal
/// solve with the discrete Dirichlet Laplacian.
pub fn h_neg1(u: &GridFunction) -> f64 {
    let k = dirichlet_laplacian(u.grid());
    let y = k.solve(u.values()).expect("Dirichlet Laplacian is SPD");
    let s: f64 = u.values().iter().zip(&y).map(|(a, b)| a * b).sum();
    // K is SPD so the quadratic form is nonnegative up to rounding.
    (u.grid().h() * s).max(0.0).sqrt()
}

/// All norms the function spaces of the problem call for.
#[derive(Clone, Copy, Debug)]
pub struct NormBundle {
    pub l2: f64,
    pub lp_grad: f64,
    pub h1: f64,
    pub h_neg1: f64,
    pub w1inf: f64,
}

pub fn norms(u: &GridFunction, p: f64) -> NormBundle {
    NormBundle {
        l2: l2(u),
        lp_grad: lp_grad(u, p),
        h1: h1(u),
        h_neg1: h_neg1(u),
        w1inf: w1inf(u),
    }
}

/// Random combination of the first `max_mode` sine modes with 1/k decaying
/// uniform coefficients. Callers rescale to the norm they need.
pub fn random_combination(grid: Grid, max_mode: usize, rng: &mut impl Rng) -> GridFunction {
    let coeffs: Vec<f64> = (1..=max_mode)
        .map(|k| (rng.gen::<f64>() * 2.0 - 1.0) / k as f64)
        .collect();
    GridFunction::sample(grid, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let k = (j + 1) as f64;
                c * std::f64::consts::SQRT_2 * (k * std::f64::consts::PI * x).sin()
            })
            .sum()
    })
}
