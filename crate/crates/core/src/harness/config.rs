//! Experiment configuration files (TOML).
//!
//! ```toml
//! seeds = [1, 2, 3]
//!
//! [problem]
//! family = "quadratic"
//! n = 20
//! l = 1.0
//!
//! [model]
//! family = "linear"
//! batch = 1
//! noise = { kind = "gaussian-isotropic", sigma = 0.1 }
//!
//! [solver]
//! method = "fgm"
//! n_iter = 400
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Unknown keys anywhere are errors.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::generate::ProblemSpec;
use crate::error::{Error, Result};
use crate::oracle::NoiseKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Linear,
    Composite,
    MaxLinear,
}

fn default_noise() -> NoiseKind {
    NoiseKind::None
}

fn default_batch() -> usize {
    1
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: ModelKind,
    #[serde(default = "default_noise")]
    pub noise: NoiseKind,
    /// Mini-batch size `r` per model refresh.
    #[serde(default = "default_batch")]
    pub batch: usize,
    /// Double `L` in the model when the oracle is noisy.
    #[serde(default = "default_true")]
    pub double_l: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Gm,
    Fgm,
    SgdSmallStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub method: SolverKind,
    pub n_iter: usize,
    /// SGD step; defaults to `min(1/L, R / (sigma sqrt(N)))`.
    #[serde(default)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Relative paths are resolved against the config file's directory.
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Inclusive `[k_min, k_max]` for the rate fit of the median curve;
    /// defaults to `[max(1, N/10), N]`.
    #[serde(default)]
    pub rate_window: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seeds: Vec<u64>,
    pub problem: ProblemSpec,
    pub model: ModelConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

impl ExperimentConfig {
    /// Parses and validates a config; errors carry the line and key.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path`; a relative output dir is taken relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if cfg.output.dir.is_relative() {
            if let Some(parent) = path.parent() {
                cfg.output.dir = parent.join(&cfg.output.dir);
            }
        }
        Ok(cfg)
    }

    /// Checks everything that can be checked without generating the
    /// problem, including the model/solver/problem combination.
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds: must be nonempty".into()));
        }
        let unique: BTreeSet<_> = self.seeds.iter().collect();
        if unique.len() != self.seeds.len() {
            return Err(Error::Config("seeds: duplicate entries".into()));
        }
        if self.model.batch == 0 {
            return Err(Error::Config("model.batch: must be >= 1".into()));
        }
        let sigma = self.model.noise.sigma();
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("model.noise.sigma = {sigma}: must be >= 0")));
        }
        if self.solver.n_iter == 0 {
            return Err(Error::Config("solver.n_iter: must be >= 1".into()));
        }
        if let Some(h) = self.solver.step {
            if self.solver.method != SolverKind::SgdSmallStep {
                return Err(Error::Config("solver.step: only used by sgd-small-step".into()));
            }
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!("solver.step = {h}: must be > 0")));
            }
        }
        if let Some((lo, hi)) = self.analysis.rate_window {
            if lo == 0 || lo > hi {
                return Err(Error::Config(format!("analysis.rate_window = [{lo}, {hi}]: need 1 <= k_min <= k_max")));
            }
        }
        let expected = match self.problem {
            ProblemSpec::Quadratic { .. } | ProblemSpec::LeastSquares { .. } => ModelKind::Linear,
            ProblemSpec::Lasso { .. } => ModelKind::Composite,
            ProblemSpec::MaxQuadratics { .. } => ModelKind::MaxLinear,
        };
        if self.model.family != expected {
            return Err(Error::Unsupported(format!(
                "model family {:?} on a {} problem; use {:?}",
                self.model.family,
                self.problem.family(),
                expected
            )));
        }
        if self.solver.method == SolverKind::SgdSmallStep && self.model.family != ModelKind::Linear {
            return Err(Error::Unsupported(
                "sgd-small-step needs a smooth problem with the linear model".into(),
            ));
        }
        Ok(())
    }
}
