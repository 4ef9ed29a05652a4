//! Dense points of the iterate space.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// A dense real vector. Dimension is fixed at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    /// Builds a point, rejecting empty or non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::contract("point dimension must be >= 1"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::contract(format!("coordinate {i} is not finite")));
        }
        Ok(Point(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Point((0..n).map(f).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    /// `self + a * other`
    pub fn add_scaled(&self, a: f64, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(x, y)| x + a * y).collect())
    }

    /// In-place `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Point) {
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x += a * y;
        }
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.add_scaled(-1.0, other)
    }

    pub fn scale(&self, a: f64) -> Point {
        Point(self.0.iter().map(|x| a * x).collect())
    }

    /// `(wa * a + wb * b) / (wa + wb)`, evaluated coordinatewise.
    pub fn convex_combination(wa: f64, a: &Point, wb: f64, b: &Point) -> Point {
        let total = wa + wb;
        Point(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| (wa * x + wb * y) / total)
                .collect(),
        )
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Squared Euclidean distance `sum_i (a_i - b_i)^2`.
pub fn distance_sq(a: &Point, b: &Point) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let a = Point::from([1.0, 2.0, 3.0]);
        assert_eq!(distance_sq(&a, &a).unwrap(), 0.0);
        let o = Point::from([0.0, 0.0]);
        assert_eq!(distance_sq(&o, &Point::from([3.0, 4.0])).unwrap(), 25.0);
        let p = Point::from([1.0, 1.0]);
        let m = Point::from([-1.0, -1.0]);
        assert_eq!(distance_sq(&p, &m).unwrap(), 8.0);
        assert_eq!(distance_sq(&m, &p).unwrap(), 8.0);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let err = distance_sq(&Point::zeros(2), &Point::zeros(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, got: 3 });
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::new(vec![0.5]).is_ok());
    }
}
