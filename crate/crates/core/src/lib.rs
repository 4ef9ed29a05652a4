//! First-order methods on inexact `(delta, L)`-models.
//!
//! The crate provides a gradient method and a fast (accelerated) gradient
//! method that work on any model of the objective satisfying a two-sided
//! sandwich inequality, together with the models that arise from
//! stochastic subgaussian gradients, mini-batching, composite objectives
//! and maxima of smooth functions. A planner picks iteration counts and
//! batch sizes for a target accuracy, and the [`harness`] module runs
//! seeded experiments and checks the methods' convergence guarantees
//! empirically.
//!
//! ```
//! use std::sync::Arc;
//! use modelopt::{functions::Quadratic, linear_model, run_fgm, FeasibleSet, GradOracle, Point, Problem};
//!
//! let f = Quadratic::diagonal(vec![1.0, 10.0], Point::zeros(2)).unwrap();
//! let problem = Problem::new(Arc::new(f), 10.0, 0.0, FeasibleSet::full(2), 2f64.sqrt())
//!     .unwrap()
//!     .with_minimizer(Point::zeros(2))
//!     .unwrap();
//! let mut model = linear_model(GradOracle::exact(problem.clone()));
//! let trace = run_fgm(&problem, &mut model, &Point::from([1.0, 1.0]), 50).unwrap();
//! assert!(trace.output_gap.unwrap() <= trace.last().bound.unwrap());
//! ```

pub mod error;
pub mod functions;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod planner;
pub mod point;
pub mod problem;
pub mod set;
pub mod solver;
pub mod subproblem;
pub mod trace;

pub use error::{Error, Result};
pub use model::{
    composite_model, linear_model, max_smooth_model, verify_model_sandwich, CompositeSpec, MaxSmoothSpec, Model,
    ModelFamily, SmoothComponent,
};
pub use oracle::{subgaussian_moment_check, GradOracle, NoiseKind, NoiseSpec};
pub use planner::{plan, Plan};
pub use point::{distance_sq, Point};
pub use problem::{Objective, Problem, Regularizer};
pub use set::FeasibleSet;
pub use solver::{alpha_next, run_fgm, run_gm, run_sgd_small_step};
pub use subproblem::{solve_prox, ProxTask};
pub use trace::{Method, Record, Trace};
