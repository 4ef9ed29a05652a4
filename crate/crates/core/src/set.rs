//! Closed convex feasible sets and Euclidean projection onto them.

use crate::error::{check_dim, Error, Result};
use crate::point::Point;

/// Absolute tolerance for membership checks.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    FullSpace(usize),
    Box { lower: Point, upper: Point },
    Ball { center: Point, radius: f64 },
    /// The standard simplex `{x >= 0, sum x = 1}` in dimension n.
    Simplex(usize),
}

impl FeasibleSet {
    pub fn full(n: usize) -> Self {
        FeasibleSet::FullSpace(n)
    }

    pub fn boxed(lower: Point, upper: Point) -> Result<Self> {
        let set = FeasibleSet::Box { lower, upper };
        set.validate()?;
        Ok(set)
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        let set = FeasibleSet::Ball { center, radius };
        set.validate()?;
        Ok(set)
    }

    pub fn simplex(n: usize) -> Self {
        FeasibleSet::Simplex(n)
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::FullSpace(n) | FeasibleSet::Simplex(n) => *n,
            FeasibleSet::Box { lower, .. } => lower.dim(),
            FeasibleSet::Ball { center, .. } => center.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FeasibleSet::FullSpace(0) | FeasibleSet::Simplex(0) => {
                Err(Error::InvalidSet("dimension must be >= 1".into()))
            }
            FeasibleSet::FullSpace(_) | FeasibleSet::Simplex(_) => Ok(()),
            FeasibleSet::Box { lower, upper } => {
                check_dim(lower.dim(), upper.dim())?;
                match lower.iter().zip(upper.iter()).position(|(l, u)| l > u) {
                    Some(i) => Err(Error::InvalidSet(format!(
                        "box lower > upper at coordinate {i}"
                    ))),
                    None => Ok(()),
                }
            }
            FeasibleSet::Ball { radius, .. } => {
                if radius.is_finite() && *radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidSet(format!("ball radius {radius} must be > 0")))
                }
            }
        }
    }

    pub fn contains(&self, z: &Point) -> bool {
        if z.dim() != self.dim() {
            return false;
        }
        match self {
            FeasibleSet::FullSpace(_) => z.is_finite(),
            FeasibleSet::Box { lower, upper } => z
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(x, (l, u))| *x >= l - MEMBERSHIP_TOL && *x <= u + MEMBERSHIP_TOL),
            FeasibleSet::Ball { center, radius } => {
                z.sub(center).norm() <= radius + MEMBERSHIP_TOL
            }
            FeasibleSet::Simplex(_) => {
                z.iter().all(|&x| x >= -MEMBERSHIP_TOL)
                    && (z.iter().sum::<f64>() - 1.0).abs() <= MEMBERSHIP_TOL
            }
        }
    }

    /// Euclidean projection of `z` onto the set.
    pub fn project(&self, z: &Point) -> Result<Point> {
        check_dim(self.dim(), z.dim())?;
        self.validate()?;
        Ok(match self {
            FeasibleSet::FullSpace(_) => z.clone(),
            FeasibleSet::Box { lower, upper } => Point::from_fn(z.dim(), |i| {
                z[i].clamp(lower[i], upper[i])
            }),
            FeasibleSet::Ball { center, radius } => {
                let d = z.sub(center);
                let norm = d.norm();
                if norm <= *radius {
                    z.clone()
                } else {
                    center.add_scaled(radius / norm, &d)
                }
            }
            FeasibleSet::Simplex(_) => project_simplex(z),
        })
    }

    /// A deterministic member of the set, used as a default start.
    pub fn anchor(&self) -> Point {
        match self {
            FeasibleSet::FullSpace(n) => Point::zeros(*n),
            FeasibleSet::Box { lower, upper } => Point::convex_combination(1.0, lower, 1.0, upper),
            FeasibleSet::Ball { center, .. } => center.clone(),
            FeasibleSet::Simplex(n) => Point::from(vec![1.0 / *n as f64; *n]),
        }
    }
}

/// Projection onto the standard simplex by sorting: find the largest `k`
/// with `s_k - (sum_{j<=k} s_j - 1)/k > 0` on the descending sort `s`,
/// then shift by the threshold and clip at zero.
pub(crate) fn project_simplex(z: &Point) -> Point {
    let mut sorted = z.as_slice().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    Point::from_fn(z.dim(), |i| (z[i] - theta).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_space_is_identity() {
        let z = Point::from([3.0, -2.0]);
        assert_eq!(FeasibleSet::full(2).project(&z).unwrap(), z);
    }

    #[test]
    fn simplex_symmetric_point() {
        let p = FeasibleSet::simplex(2).project(&Point::from([1.0, 1.0])).unwrap();
        assert_eq!(p.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn simplex_vertex() {
        let p = FeasibleSet::simplex(2).project(&Point::from([2.0, 0.0])).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn box_rejects_inverted_bounds() {
        let err = FeasibleSet::boxed(Point::from([0.0, 2.0]), Point::from([1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::InvalidSet(_)));
        // Constructed directly, the error surfaces at projection time.
        let raw = FeasibleSet::Box {
            lower: Point::from([1.0]),
            upper: Point::from([0.0]),
        };
        assert!(matches!(
            raw.project(&Point::from([0.5])),
            Err(Error::InvalidSet(_))
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let err = FeasibleSet::simplex(3).project(&Point::zeros(2)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn ball_projection_scales_to_boundary() {
        let set = FeasibleSet::ball(Point::from([1.0, 0.0]), 2.0).unwrap();
        let p = set.project(&Point::from([1.0, 4.0])).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && (p[1] - 2.0).abs() < 1e-15);
        assert!(FeasibleSet::ball(Point::zeros(1), 0.0).is_err());
    }
}
