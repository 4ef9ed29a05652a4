//! Problem generators, seeded experiments, rate fits and the built-in
//! verification suites.

pub mod config;
pub mod experiment;
pub mod generate;
pub mod rates;
pub mod stats;
pub mod verify;

pub use config::{ExperimentConfig, ModelKind, OutputFormat, SolverKind};
pub use experiment::{execute, rates_from_csv, run_experiment, Aggregate, Experiment, RunResult};
pub use generate::{gen_problem, Generated, ProblemSpec, SetSpec, Spectrum};
pub use rates::{estimate_rate, RateFit};
pub use verify::{run_criterion, run_suite, CriterionResult, Suite};
