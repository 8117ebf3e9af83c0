//! Finite-difference simulation and verification toolkit for the one
//! dimensional strongly damped wave equation with p-Laplacian diffusion,
//!
//! ```text
//! u_tt - u_txx - (|u_x|^{p-2} u_x)_x + f(u) = g(x)   on (0,1),  u(0) = u(1) = 0,
//! ```
//!
//! with exponent p > 2. The crate provides implicit time integration of the
//! (u, u_t) system, energy/Lyapunov bookkeeping, stationary-point solvers,
//! sine-eigenbasis spectral diagnostics, scalar differential-inequality
//! bounds, and a property-based verification battery ([`checks`]) that the
//! `plap` CLI exposes as the `suite` subcommand.
//!
//! With the `parallel` feature (default) the embarrassingly parallel parts,
//! such as trajectory ensembles, multistart solves and randomized campaigns,
//! fan out over rayon; without it everything runs sequentially.

// Validation uses `!(x > bound)` on purpose: it rejects NaN, which the
// suggested `x <= bound` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod dynamics;
pub mod energy;
mod error;
pub mod exec;
pub mod grid;
pub mod io;
pub mod model;
pub mod odebound;
pub mod spectral;
pub mod stationary;
pub mod tridiag;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
