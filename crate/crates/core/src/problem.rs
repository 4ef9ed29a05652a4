//! Objectives and problem instances.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::point::Point;
use crate::set::FeasibleSet;

/// A function evaluator on `R^n`.
///
/// `gradient` returns `None` when no exact gradient is available, e.g. for
/// nonsmooth composite or max-type objectives.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &Point) -> f64;

    fn gradient(&self, _x: &Point) -> Option<Point> {
        None
    }
}

/// Simple convex term `h` of a composite objective `f + h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    Zero,
    L1(f64),
    /// Indicator of the feasible set; realized by constraining the
    /// subproblem rather than by returning infinite values.
    IndicatorOfQ,
}

impl Regularizer {
    pub fn value(&self, x: &Point) -> f64 {
        match self {
            Regularizer::Zero | Regularizer::IndicatorOfQ => 0.0,
            Regularizer::L1(lambda) => lambda * x.norm_l1(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Regularizer::L1(lambda) if !(*lambda >= 0.0 && lambda.is_finite()) => {
                Err(Error::contract(format!("L1 weight {lambda} must be >= 0")))
            }
            _ => Ok(()),
        }
    }
}

/// `f + h` for a smooth `f` and a simple `h`. The gradient reported is the
/// gradient of the smooth part only.
pub struct CompositeObjective {
    pub smooth: Arc<dyn Objective>,
    pub h: Regularizer,
}

impl Objective for CompositeObjective {
    fn dim(&self) -> usize {
        self.smooth.dim()
    }

    fn value(&self, x: &Point) -> f64 {
        self.smooth.value(x) + self.h.value(x)
    }
}

/// Pointwise maximum of a family of objectives.
pub struct MaxObjective {
    pub components: Vec<Arc<dyn Objective>>,
}

impl Objective for MaxObjective {
    fn dim(&self) -> usize {
        self.components[0].dim()
    }

    fn value(&self, x: &Point) -> f64 {
        self.components
            .iter()
            .map(|c| c.value(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A problem instance `min_{x in Q} f(x)` together with the constants the
/// methods and their guarantees depend on.
#[derive(Clone)]
pub struct Problem {
    pub objective: Arc<dyn Objective>,
    /// Lipschitz constant of the (smooth part's) gradient.
    pub l: f64,
    /// Strong-convexity constant.
    pub mu: f64,
    pub set: FeasibleSet,
    pub x_star: Option<Point>,
    pub f_star: Option<f64>,
    /// Upper bound on `||x0 - x_star||`.
    pub r: f64,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("n", &self.dim())
            .field("l", &self.l)
            .field("mu", &self.mu)
            .field("set", &self.set)
            .field("f_star", &self.f_star)
            .field("r", &self.r)
            .finish()
    }
}

impl Problem {
    /// Builds a problem and checks its invariants. `r` must be supplied by
    /// the caller; it is never estimated.
    pub fn new(
        objective: Arc<dyn Objective>,
        l: f64,
        mu: f64,
        set: FeasibleSet,
        r: f64,
    ) -> Result<Self> {
        let p = Problem {
            objective,
            l,
            mu,
            set,
            x_star: None,
            f_star: None,
            r,
        };
        p.validate()?;
        Ok(p)
    }

    /// Attaches a known minimizer; `f_star` is taken as `f(x_star)`.
    pub fn with_minimizer(mut self, x_star: Point) -> Result<Self> {
        check_dim(self.dim(), x_star.dim())?;
        if !self.set.contains(&x_star) {
            return Err(Error::contract("x_star is not in the feasible set"));
        }
        self.f_star = Some(self.objective.value(&x_star));
        self.x_star = Some(x_star);
        Ok(self)
    }

    /// Attaches a reference optimal value without a minimizer.
    pub fn with_optimal_value(mut self, f_star: f64) -> Self {
        self.f_star = Some(f_star);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::contract(format!("L = {} must be > 0", self.l)));
        }
        if !(self.mu >= 0.0 && self.mu <= self.l) {
            return Err(Error::contract(format!(
                "mu = {} must lie in [0, L = {}]",
                self.mu, self.l
            )));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::contract(format!("R = {} must be > 0", self.r)));
        }
        check_dim(self.objective.dim(), self.set.dim())?;
        self.set.validate()
    }

    /// Checks `R >= ||x0 - x_star||` when the minimizer is known.
    pub fn check_start(&self, x0: &Point) -> Result<()> {
        check_dim(self.dim(), x0.dim())?;
        if !self.set.contains(x0) {
            return Err(Error::contract("x0 is not in the feasible set"));
        }
        if let Some(xs) = &self.x_star {
            let d = x0.sub(xs).norm();
            if d > self.r * (1.0 + 1e-12) {
                return Err(Error::contract(format!(
                    "R = {} is smaller than ||x0 - x_star|| = {d}",
                    self.r
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn value(&self, x: &Point) -> f64 {
        self.objective.value(x)
    }

    /// Exact gradient, if the objective provides one.
    pub fn grad(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x.dim())?;
        self.objective
            .gradient(x)
            .ok_or_else(|| Error::Unsupported("objective has no exact gradient".into()))
    }

    pub fn gap(&self, x: &Point) -> Option<f64> {
        self.f_star.map(|fs| self.value(x) - fs)
    }
}
