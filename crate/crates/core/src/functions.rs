//! Concrete smooth objectives.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::problem::Objective;

#[derive(Debug, Clone)]
enum Hessian {
    Diagonal(Vec<f64>),
    Dense(DMatrix<f64>),
}

/// `f(x) = 1/2 (x - c)^T H (x - c) + offset` with `H` symmetric PSD.
#[derive(Debug, Clone)]
pub struct Quadratic {
    hessian: Hessian,
    center: Point,
    offset: f64,
}

impl Quadratic {
    pub fn diagonal(diag: Vec<f64>, center: Point) -> Result<Self> {
        if diag.len() != center.dim() {
            return Err(Error::DimensionMismatch {
                expected: diag.len(),
                got: center.dim(),
            });
        }
        if diag.iter().any(|d| !(*d >= 0.0)) {
            return Err(Error::contract("diagonal Hessian entries must be >= 0"));
        }
        Ok(Quadratic {
            hessian: Hessian::Diagonal(diag),
            center,
            offset: 0.0,
        })
    }

    /// `H` must be symmetric; it is not checked for definiteness.
    pub fn dense(h: DMatrix<f64>, center: Point) -> Result<Self> {
        if h.nrows() != h.ncols() || h.nrows() != center.dim() {
            return Err(Error::DimensionMismatch {
                expected: center.dim(),
                got: h.nrows(),
            });
        }
        Ok(Quadratic {
            hessian: Hessian::Dense(h),
            center,
            offset: 0.0,
        })
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    fn apply(&self, d: &Point) -> Point {
        match &self.hessian {
            Hessian::Diagonal(diag) => Point::from_fn(d.dim(), |i| diag[i] * d[i]),
            Hessian::Dense(h) => {
                let v = h * DVector::from_column_slice(d);
                Point::from(v.as_slice().to_vec())
            }
        }
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.center.dim()
    }

    fn value(&self, x: &Point) -> f64 {
        let d = x.sub(&self.center);
        0.5 * d.dot(&self.apply(&d)) + self.offset
    }

    fn gradient(&self, x: &Point) -> Option<Point> {
        Some(self.apply(&x.sub(&self.center)))
    }
}

/// `f(x) = 1/2 ||A x - b||^2`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl LeastSquares {
    pub fn new(a: DMatrix<f64>, b: Vec<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        Ok(LeastSquares {
            a,
            b: DVector::from_vec(b),
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    fn residual(&self, x: &Point) -> DVector<f64> {
        &self.a * DVector::from_column_slice(x) - &self.b
    }

    /// Largest eigenvalue of `A^T A` by power iteration, to relative
    /// change `tol` between successive Rayleigh quotients.
    pub fn lipschitz(&self, tol: f64) -> f64 {
        let n = self.a.ncols();
        let gram = self.a.transpose() * &self.a;
        // deterministic start with no zero coordinates
        let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64) / (n as f64));
        v /= v.norm();
        let mut lambda = 0.0;
        for _ in 0..100_000 {
            let w = &gram * &v;
            let next = v.dot(&w);
            let norm = w.norm();
            if norm == 0.0 {
                return 0.0;
            }
            v = w / norm;
            if (next - lambda).abs() <= tol * next.abs() {
                return next;
            }
            lambda = next;
        }
        lambda
    }

    /// Smallest eigenvalue of `A^T A` (the strong-convexity constant),
    /// clamped at zero.
    pub fn min_eigenvalue(&self) -> f64 {
        let gram = self.a.transpose() * &self.a;
        gram.symmetric_eigenvalues().min().max(0.0)
    }
}

impl Objective for LeastSquares {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &Point) -> f64 {
        0.5 * self.residual(x).norm_squared()
    }

    fn gradient(&self, x: &Point) -> Option<Point> {
        let g = self.a.transpose() * self.residual(x);
        Some(Point::from(g.as_slice().to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_quadratic_gradient() {
        let q = Quadratic::diagonal(vec![1.0, 1.0], Point::zeros(2)).unwrap();
        let g = q.gradient(&Point::from([2.0, -1.0])).unwrap();
        assert_eq!(g.as_slice(), &[2.0, -1.0]);
    }

    #[test]
    fn diagonal_quadratic_gradient_and_value() {
        let q = Quadratic::diagonal(vec![1.0, 10.0], Point::zeros(2)).unwrap();
        let x = Point::from([1.0, 1.0]);
        assert_eq!(q.gradient(&x).unwrap().as_slice(), &[1.0, 10.0]);
        assert_eq!(q.value(&x), 5.5);
    }

    #[test]
    fn dense_matches_diagonal() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0]));
        let c = Point::from([1.0, -1.0]);
        let dense = Quadratic::dense(h, c.clone()).unwrap();
        let diag = Quadratic::diagonal(vec![2.0, 3.0], c).unwrap();
        let x = Point::from([0.3, 0.7]);
        assert_eq!(dense.value(&x), diag.value(&x));
        assert_eq!(dense.gradient(&x), diag.gradient(&x));
    }

    #[test]
    fn identity_least_squares_lipschitz() {
        let ls = LeastSquares::new(DMatrix::identity(4, 4), vec![1.0; 4]).unwrap();
        assert!((ls.lipschitz(1e-8) - 1.0).abs() < 1e-12);
    }
}
