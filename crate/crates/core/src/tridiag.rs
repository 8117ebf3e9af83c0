//! Tridiagonal matrices and the Thomas solve.
//!
//! Every linear system in this crate (implicit time steps, Newton updates,
//! inverse Laplacians) is tridiagonal, symmetric positive definite or at
//! least strictly diagonally dominant, so an O(n) sweep without pivoting
//! is the right tool.

use crate::{Error, Result};

/// Tridiagonal matrix of order `n`: `sub`/`sup` hold the n-1 off-diagonal
/// entries, `diag` the n diagonal ones.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMat {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl TriMat {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Self {
        assert_eq!(sub.len() + 1, diag.len(), "sub-diagonal length mismatch");
        assert_eq!(sup.len() + 1, diag.len(), "sup-diagonal length mismatch");
        TriMat { sub, diag, sup }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.sup[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Solves A x = rhs by the Thomas algorithm. Fails on a vanishing pivot.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        assert_eq!(rhs.len(), n);
        let mut c = vec![0.0; n]; // modified sup-diagonal
        let mut x: Vec<f64> = rhs.to_vec();

        let mut pivot = self.diag[0];
        if !pivot.is_finite() || pivot.abs() < f64::MIN_POSITIVE {
            return Err(Error::SingularJacobian { row: 0, pivot });
        }
        if n > 1 {
            c[0] = self.sup[0] / pivot;
        }
        x[0] /= pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.sub[i - 1] * c[i - 1];
            if !pivot.is_finite() || pivot.abs() < f64::MIN_POSITIVE {
                return Err(Error::SingularJacobian { row: i, pivot });
            }
            if i + 1 < n {
                c[i] = self.sup[i] / pivot;
            }
            x[i] = (x[i] - self.sub[i - 1] * x[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_rhs() {
        let n = 9;
        let m = TriMat::new(
            vec![-1.0; n - 1],
            vec![2.5; n],
            vec![-1.0; n - 1],
        );
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let rhs = m.matvec(&x_true);
        let x = m.solve(&rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = TriMat::new(vec![0.0], vec![0.0, 1.0], vec![0.0]);
        assert!(matches!(
            m.solve(&[1.0, 1.0]),
            Err(Error::SingularJacobian { row: 0, .. })
        ));
    }
}
