//! Exact and stochastic first-order oracles.
//!
//! A [`GradOracle`] returns `grad f(x) + eta`, where `eta` is drawn according
//! to a [`NoiseSpec`]. Each oracle owns a ChaCha8 stream keyed by
//! `(seed, stream)`, so two oracles built from the same pair produce
//! bit-identical noise, and oracles on distinct streams are independent.
//! Batched draws average `r` independent samples and are charged `r` calls.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::point::Point;
use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseKind {
    None,
    /// Independent `N(0, sigma^2 / n)` coordinates, so `E||eta||^2 = sigma^2`.
    GaussianIsotropic { sigma: f64 },
    /// Uniform on the sphere of radius `sigma`.
    BoundedSphere { sigma: f64 },
}

impl NoiseKind {
    pub fn sigma(&self) -> f64 {
        match self {
            NoiseKind::None => 0.0,
            NoiseKind::GaussianIsotropic { sigma } | NoiseKind::BoundedSphere { sigma } => *sigma,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, NoiseKind::None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub kind: NoiseKind,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec {
            kind: NoiseKind::None,
            seed: 0,
        }
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        NoiseSpec {
            kind: NoiseKind::GaussianIsotropic { sigma },
            seed,
        }
    }

    pub fn sphere(sigma: f64, seed: u64) -> Self {
        NoiseSpec {
            kind: NoiseKind::BoundedSphere { sigma },
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.kind.sigma();
        if s >= 0.0 && s.is_finite() {
            Ok(())
        } else {
            Err(Error::contract(format!("noise sigma {s} must be >= 0")))
        }
    }
}

/// SplitMix64 finalizer; used to derive child stream ids.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stochastic gradient oracle with mini-batching and call accounting.
pub struct GradOracle {
    problem: Problem,
    noise: NoiseSpec,
    batch: usize,
    calls: u64,
    stream: u64,
    forks: u64,
    rng: ChaCha8Rng,
    last_noise: Option<Point>,
}

impl std::fmt::Debug for GradOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradOracle")
            .field("noise", &self.noise)
            .field("batch", &self.batch)
            .field("calls", &self.calls)
            .field("stream", &self.stream)
            .finish()
    }
}

impl GradOracle {
    pub fn new(problem: Problem, noise: NoiseSpec, batch: usize) -> Result<Self> {
        Self::with_stream(problem, noise, batch, 0)
    }

    /// An oracle on an explicit stream of the seed.
    pub fn with_stream(problem: Problem, noise: NoiseSpec, batch: usize, stream: u64) -> Result<Self> {
        noise.validate()?;
        if batch == 0 {
            return Err(Error::contract("batch size must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        rng.set_stream(stream);
        Ok(GradOracle {
            problem,
            noise,
            batch,
            calls: 0,
            stream,
            forks: 0,
            rng,
            last_noise: None,
        })
    }

    /// Exact oracle: no noise, batch 1.
    pub fn exact(problem: Problem) -> Self {
        Self::new(problem, NoiseSpec::none(), 1).expect("noise-free oracle is valid")
    }

    /// A fresh oracle on the same seed. The `j`-th fork (starting at 1) of
    /// an oracle on stream `s` uses stream `mix64(s ^ j)`; its call counter
    /// starts at zero.
    pub fn fork(&mut self) -> GradOracle {
        self.forks += 1;
        let stream = mix64(self.stream ^ self.forks);
        Self::with_stream(self.problem.clone(), self.noise, self.batch, stream)
            .expect("parent oracle was valid")
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Averaged noise realized by the most recent draw.
    pub fn last_noise(&self) -> Option<&Point> {
        self.last_noise.as_ref()
    }

    /// Exact gradient; not charged as a stochastic call.
    pub fn grad(&self, x: &Point) -> Result<Point> {
        self.problem.grad(x)
    }

    fn draw_noise(&mut self, n: usize) -> Point {
        match self.noise.kind {
            NoiseKind::None => Point::zeros(n),
            NoiseKind::GaussianIsotropic { sigma } => {
                let s = sigma / (n as f64).sqrt();
                Point::from_fn(n, |_| s * self.rng.sample::<f64, _>(StandardNormal))
            }
            NoiseKind::BoundedSphere { sigma } => {
                if sigma == 0.0 {
                    return Point::zeros(n);
                }
                loop {
                    let z = Point::from_fn(n, |_| self.rng.sample::<f64, _>(StandardNormal));
                    let norm = z.norm();
                    if norm > 0.0 {
                        break z.scale(sigma / norm);
                    }
                }
            }
        }
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        check_dim(self.problem.dim(), x.dim())?;
        if !self.problem.set.contains(x) {
            return Err(Error::contract("oracle queried outside the feasible set"));
        }
        Ok(())
    }

    /// One stochastic gradient `grad f(x) + eta`.
    pub fn sample_grad(&mut self, x: &Point) -> Result<Point> {
        self.batch_grad(x, 1)
    }

    /// Average of `r` independent stochastic gradients; charged `r` calls.
    pub fn batch_grad(&mut self, x: &Point, r: usize) -> Result<Point> {
        if r == 0 {
            return Err(Error::contract("batch size must be >= 1"));
        }
        self.check_point(x)?;
        let g = self.problem.grad(x)?;
        let n = x.dim();
        let noise = if self.noise.kind.is_none() {
            Point::zeros(n)
        } else {
            let mut acc = Point::zeros(n);
            for _ in 0..r {
                let eta = self.draw_noise(n);
                acc.axpy(1.0, &eta);
            }
            acc.scale(1.0 / r as f64)
        };
        self.calls += r as u64;
        let out = g.add_scaled(1.0, &noise);
        self.last_noise = Some(noise);
        Ok(out)
    }

    /// A batched draw with the oracle's configured batch size.
    pub fn draw(&mut self, x: &Point) -> Result<Point> {
        self.batch_grad(x, self.batch)
    }

    /// Raw noise vectors of a batch, without touching the gradient or the
    /// call counter's meaning for solvers. Used by Monte-Carlo checks.
    pub fn sample_noise(&mut self, r: usize) -> Result<Point> {
        if r == 0 {
            return Err(Error::contract("batch size must be >= 1"));
        }
        let n = self.problem.dim();
        let mut acc = Point::zeros(n);
        for _ in 0..r {
            let eta = self.draw_noise(n);
            acc.axpy(1.0, &eta);
        }
        self.calls += r as u64;
        Ok(acc.scale(1.0 / r as f64))
    }
}

/// Empirical mean of `exp(s / sigma_sq)` over squared noise norms `s`.
/// The subgaussian condition asks for this to be at most `e`.
pub fn subgaussian_moment_check(samples: &[f64], sigma_sq: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::contract("no samples"));
    }
    if !(sigma_sq > 0.0) {
        return Err(Error::contract("sigma_sq must be > 0"));
    }
    Ok(samples.iter().map(|s| (s / sigma_sq).exp()).sum::<f64>() / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::functions::Quadratic;
    use crate::set::FeasibleSet;

    fn identity_problem(n: usize) -> Problem {
        let q = Quadratic::diagonal(vec![1.0; n], Point::zeros(n)).unwrap();
        Problem::new(Arc::new(q), 1.0, 1.0, FeasibleSet::full(n), 1.0).unwrap()
    }

    #[test]
    fn noise_free_sample_is_exact() {
        let mut o = GradOracle::exact(identity_problem(2));
        let x = Point::from([2.0, -1.0]);
        assert_eq!(o.sample_grad(&x).unwrap().as_slice(), &[2.0, -1.0]);
        assert_eq!(o.batch_grad(&x, 7).unwrap().as_slice(), &[2.0, -1.0]);
        assert_eq!(o.calls(), 8);
    }

    #[test]
    fn zero_batch_is_rejected() {
        let mut o = GradOracle::exact(identity_problem(2));
        assert!(o.batch_grad(&Point::zeros(2), 0).is_err());
        assert!(GradOracle::new(identity_problem(2), NoiseSpec::none(), 0).is_err());
    }

    #[test]
    fn moment_check_examples() {
        assert_eq!(subgaussian_moment_check(&[0.0; 5], 1.0).unwrap(), 1.0);
        let e = subgaussian_moment_check(&[4.0; 3], 4.0).unwrap();
        assert!((e - std::f64::consts::E).abs() < 1e-15);
        assert!(subgaussian_moment_check(&[], 1.0).is_err());
    }

    #[test]
    fn sphere_noise_has_exact_norm() {
        let mut o = GradOracle::new(identity_problem(5), NoiseSpec::sphere(3.0, 1), 1).unwrap();
        for _ in 0..100 {
            let eta = o.sample_noise(1).unwrap();
            assert!((eta.norm() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn forks_differ_from_parent_and_each_other() {
        let mut o = GradOracle::new(identity_problem(3), NoiseSpec::gaussian(1.0, 9), 1).unwrap();
        let mut a = o.fork();
        let mut b = o.fork();
        let ea = a.sample_noise(1).unwrap();
        let eb = b.sample_noise(1).unwrap();
        let eo = o.sample_noise(1).unwrap();
        assert_ne!(ea, eb);
        assert_ne!(ea, eo);
        assert_eq!(a.calls(), 1);
    }
}
