//! Random problem instances with known or reference optima.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{LeastSquares, Quadratic};
use crate::model::{composite_model, linear_model, max_smooth_model, CompositeSpec, MaxSmoothSpec, SmoothComponent};
use crate::oracle::GradOracle;
use crate::point::Point;
use crate::problem::{CompositeObjective, MaxObjective, Objective, Problem, Regularizer};
use crate::set::FeasibleSet;
use crate::solver::run_fgm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetSpec {
    Full,
    /// `[lower, upper]^n`
    Box { lower: f64, upper: f64 },
    /// Ball of the given radius around the origin.
    Ball { radius: f64 },
    Simplex,
}

impl Default for SetSpec {
    fn default() -> Self {
        SetSpec::Full
    }
}

impl SetSpec {
    pub fn build(&self, n: usize) -> Result<FeasibleSet> {
        match *self {
            SetSpec::Full => Ok(FeasibleSet::full(n)),
            SetSpec::Box { lower, upper } => {
                FeasibleSet::boxed(Point::from(vec![lower; n]), Point::from(vec![upper; n]))
            }
            SetSpec::Ball { radius } => FeasibleSet::ball(Point::zeros(n), radius),
            SetSpec::Simplex => Ok(FeasibleSet::simplex(n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Spectrum {
    /// Endpoints `mu` and `L`, interior eigenvalues uniform at random.
    #[default]
    Uniform,
    /// Evenly spaced from `mu` to `L`.
    Linspace,
    /// Geometrically spaced from `max(mu, min_eigen)` to `L`.
    Logspace,
}

fn default_one() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

fn default_min_eigen() -> f64 {
    1e-6
}

fn default_reference_iters() -> usize {
    20_000
}

/// Problem generator parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// `1/2 (x - x*)^T D (x - x*)` with spectrum of `D` in `[mu, L]`,
    /// `x*` a random member of `Q`, `f* = 0`.
    Quadratic {
        n: usize,
        l: f64,
        #[serde(default)]
        mu: f64,
        #[serde(default)]
        spectrum: Spectrum,
        #[serde(default = "default_min_eigen")]
        min_eigen: f64,
        /// Random orthogonal change of basis; diagonal otherwise.
        #[serde(default = "default_true")]
        rotate: bool,
        #[serde(default = "default_one")]
        start_distance: f64,
        #[serde(default)]
        set: SetSpec,
        #[serde(default)]
        seed: u64,
    },
    /// `1/2 ||A x - b||^2` with Gaussian `A` (entries scaled by `1/sqrt(m)`);
    /// `L` by power iteration, `mu` the smallest eigenvalue of `A^T A`.
    LeastSquares {
        m: usize,
        n: usize,
        #[serde(default = "default_one")]
        start_distance: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Least squares plus `lambda ||x||_1`; optimum from reference runs.
    /// `mu` is the smallest eigenvalue of `A^T A`.
    Lasso {
        m: usize,
        n: usize,
        lambda: f64,
        #[serde(default = "default_reference_iters")]
        reference_iters: usize,
        #[serde(default)]
        seed: u64,
    },
    /// Max of `m` diagonal convex quadratics with curvature in `[l/10, l]`
    /// (so `mu = l/10`); optimum from reference runs.
    MaxQuadratics {
        m: usize,
        n: usize,
        l: f64,
        #[serde(default)]
        set: SetSpec,
        #[serde(default = "default_reference_iters")]
        reference_iters: usize,
        #[serde(default)]
        seed: u64,
    },
}

impl ProblemSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ProblemSpec::Quadratic { .. } => "quadratic",
            ProblemSpec::LeastSquares { .. } => "least-squares",
            ProblemSpec::Lasso { .. } => "lasso",
            ProblemSpec::MaxQuadratics { .. } => "max-quadratics",
        }
    }
}

/// A generated instance with everything needed to build its models.
#[derive(Clone)]
pub struct Generated {
    /// The full objective (with `h` or the max), its set, constants and
    /// known or reference optimum.
    pub problem: Problem,
    /// Smooth part with exact gradients (absent for max-type problems).
    pub smooth: Option<Problem>,
    /// Components of a max-type objective, as smooth problems.
    pub components: Vec<Problem>,
    pub h: Regularizer,
    pub x0: Point,
}

/// Reference optimum from two long FGM runs that must agree.
#[derive(Debug, Clone)]
pub struct Reference {
    pub x: Point,
    pub value: f64,
    pub disagreement: f64,
}

/// Agreement required between the two reference runs.
pub const REFERENCE_AGREEMENT: f64 = 1e-9;

fn gaussian_point(rng: &mut ChaCha8Rng, n: usize) -> Point {
    Point::from_fn(n, |_| rng.sample::<f64, _>(StandardNormal))
}

fn unit_direction(rng: &mut ChaCha8Rng, n: usize) -> Point {
    loop {
        let z = gaussian_point(rng, n);
        let norm = z.norm();
        if norm > 0.0 {
            return z.scale(1.0 / norm);
        }
    }
}

/// A random member of `set`, away from its boundary where possible.
fn random_member(rng: &mut ChaCha8Rng, set: &FeasibleSet) -> Result<Point> {
    let n = set.dim();
    match set {
        FeasibleSet::FullSpace(_) => Ok(gaussian_point(rng, n)),
        FeasibleSet::Box { lower, upper } => Ok(Point::from_fn(n, |i| {
            let t: f64 = rng.random_range(0.25..0.75);
            lower[i] + t * (upper[i] - lower[i])
        })),
        FeasibleSet::Ball { center, radius } => {
            let d = unit_direction(rng, n);
            let t: f64 = rng.random_range(0.0..0.5);
            Ok(center.add_scaled(t * radius, &d))
        }
        FeasibleSet::Simplex(_) => {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
            let s: f64 = w.iter().sum();
            Ok(Point::from(w.into_iter().map(|v| v / s).collect::<Vec<_>>()))
        }
    }
}

fn spectrum(rng: &mut ChaCha8Rng, kind: Spectrum, n: usize, l: f64, mu: f64, min_eigen: f64) -> Vec<f64> {
    if n == 1 {
        return vec![l];
    }
    match kind {
        Spectrum::Uniform => (0..n)
            .map(|i| match i {
                0 => mu,
                i if i == n - 1 => l,
                _ => rng.random_range(mu..=l),
            })
            .collect(),
        Spectrum::Linspace => (0..n)
            .map(|i| mu + (l - mu) * i as f64 / (n - 1) as f64)
            .collect(),
        Spectrum::Logspace => {
            let lo = mu.max(min_eigen).ln();
            let hi = l.ln();
            (0..n)
                .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {v} must be > 0")))
    }
}

fn check_dim(name: &str, v: usize) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be >= 1")))
    }
}

/// Builds the instance described by `spec`.
pub fn gen_problem(spec: &ProblemSpec) -> Result<Generated> {
    match spec {
        ProblemSpec::Quadratic {
            n,
            l,
            mu,
            spectrum: kind,
            min_eigen,
            rotate,
            start_distance,
            set,
            seed,
        } => {
            check_dim("n", *n)?;
            check_positive("l", *l)?;
            check_positive("start_distance", *start_distance)?;
            if !(*mu >= 0.0 && mu <= l) {
                return Err(Error::Config(format!("mu = {mu} must lie in [0, l]")));
            }
            if *kind == Spectrum::Logspace {
                check_positive("min_eigen", *min_eigen)?;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let set = set.build(*n)?;
            let eig = spectrum(&mut rng, *kind, *n, *l, *mu, *min_eigen);
            let x_star = random_member(&mut rng, &set)?;
            let q = if *rotate {
                let u = random_orthogonal(&mut rng, *n);
                let d = DMatrix::from_diagonal(&DVector::from_vec(eig));
                let h = &u * d * u.transpose();
                Quadratic::dense((&h + h.transpose()) * 0.5, x_star.clone())?
            } else {
                Quadratic::diagonal(eig, x_star.clone())?
            };
            let dir = unit_direction(&mut rng, *n);
            let x0 = set.project(&x_star.add_scaled(*start_distance, &dir))?;
            let r = x0.sub(&x_star).norm().max(f64::MIN_POSITIVE);
            let problem = Problem::new(Arc::new(q), *l, *mu, set, r)?.with_minimizer(x_star)?;
            Ok(Generated {
                smooth: Some(problem.clone()),
                problem,
                components: vec![],
                h: Regularizer::Zero,
                x0,
            })
        }
        ProblemSpec::LeastSquares {
            m,
            n,
            start_distance,
            seed,
        } => {
            check_dim("m", *m)?;
            check_dim("n", *n)?;
            check_positive("start_distance", *start_distance)?;
            if m < n {
                return Err(Error::Config("least-squares needs m >= n for a unique minimizer".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let (ls, b) = random_least_squares(&mut rng, *m, *n)?;
            let a = ls.matrix().clone();
            let gram = a.transpose() * &a;
            let rhs = a.transpose() * DVector::from_vec(b);
            let x_star = gram
                .cholesky()
                .ok_or_else(|| Error::Config("Gram matrix is singular".into()))?
                .solve(&rhs);
            let x_star = Point::from(x_star.as_slice().to_vec());
            let l = ls.lipschitz(1e-8);
            let mu = ls.min_eigenvalue().min(l);
            let dir = unit_direction(&mut rng, *n);
            let x0 = x_star.add_scaled(*start_distance, &dir);
            let problem = Problem::new(Arc::new(ls), l, mu, FeasibleSet::full(*n), *start_distance)?
                .with_minimizer(x_star)?;
            Ok(Generated {
                smooth: Some(problem.clone()),
                problem,
                components: vec![],
                h: Regularizer::Zero,
                x0,
            })
        }
        ProblemSpec::Lasso {
            m,
            n,
            lambda,
            reference_iters,
            seed,
        } => {
            check_dim("m", *m)?;
            check_dim("n", *n)?;
            check_dim("reference_iters", *reference_iters)?;
            if !(*lambda >= 0.0) {
                return Err(Error::Config(format!("lambda = {lambda} must be >= 0")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let (ls, _) = random_least_squares(&mut rng, *m, *n)?;
            let l = ls.lipschitz(1e-8);
            let mu = ls.min_eigenvalue().min(l);
            let smooth_obj: Arc<dyn Objective> = Arc::new(ls);
            let h = Regularizer::L1(*lambda);
            let x0 = Point::zeros(*n);
            // R is provisional until the reference is known
            let smooth = Problem::new(smooth_obj.clone(), l, mu, FeasibleSet::full(*n), 1.0)?;
            let full = Problem::new(
                Arc::new(CompositeObjective { smooth: smooth_obj, h }),
                l,
                mu,
                FeasibleSet::full(*n),
                1.0,
            )?;
            let mut gen = Generated {
                problem: full,
                smooth: Some(smooth),
                components: vec![],
                h,
                x0,
            };
            let alt = gen.x0.add_scaled(1.0, &unit_direction(&mut rng, *n));
            let reference = reference_optimum(&gen, &alt, *reference_iters)?;
            gen.attach_reference(&reference);
            Ok(gen)
        }
        ProblemSpec::MaxQuadratics {
            m,
            n,
            l,
            set,
            reference_iters,
            seed,
        } => {
            check_dim("m", *m)?;
            check_dim("n", *n)?;
            check_dim("reference_iters", *reference_iters)?;
            check_positive("l", *l)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let set = set.build(*n)?;
            let mut components = Vec::with_capacity(*m);
            let mut objectives: Vec<Arc<dyn Objective>> = Vec::with_capacity(*m);
            for _ in 0..*m {
                let diag: Vec<f64> = (0..*n).map(|_| rng.random_range(0.1 * l..=*l)).collect();
                let center = gaussian_point(&mut rng, *n);
                let offset: f64 = rng.random_range(-1.0..1.0);
                let q: Arc<dyn Objective> = Arc::new(Quadratic::diagonal(diag, center)?.with_offset(offset));
                components.push(Problem::new(q.clone(), *l, 0.1 * l, set.clone(), 1.0)?);
                objectives.push(q);
            }
            let x0 = set.anchor();
            // every component is (l/10)-strongly convex, hence so is the max
            let full = Problem::new(Arc::new(MaxObjective { components: objectives }), *l, 0.1 * l, set.clone(), 1.0)?;
            let mut gen = Generated {
                problem: full,
                smooth: None,
                components,
                h: Regularizer::Zero,
                x0,
            };
            let alt = set.project(&gen.x0.add_scaled(1.0, &unit_direction(&mut rng, *n)))?;
            let reference = reference_optimum(&gen, &alt, *reference_iters)?;
            gen.attach_reference(&reference);
            Ok(gen)
        }
    }
}

fn random_least_squares(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Result<(LeastSquares, Vec<f64>)> {
    let scale = 1.0 / (m as f64).sqrt();
    let a = DMatrix::from_fn(m, n, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
    let b: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Ok((LeastSquares::new(a, b.clone())?, b))
}

impl Generated {
    /// Exact model of the instance (no noise): linear, composite or
    /// max-linear according to its structure.
    pub fn exact_model(&self) -> Result<crate::model::Model> {
        if !self.components.is_empty() {
            let comps = self
                .components
                .iter()
                .map(|c| SmoothComponent {
                    objective: c.objective.clone(),
                    oracle: GradOracle::exact(c.clone()),
                })
                .collect();
            max_smooth_model(MaxSmoothSpec {
                components: comps,
                l_shared: self.problem.l,
            })
            .map(|m| m.with_mu(self.problem.mu))
        } else {
            let smooth = self.smooth.clone().expect("smooth part");
            let mu = smooth.mu;
            let oracle = GradOracle::exact(smooth);
            match self.h {
                Regularizer::Zero => Ok(linear_model(oracle).with_mu(mu)),
                h => composite_model(CompositeSpec {
                    smooth_oracle: oracle,
                    h,
                })
                .map(|m| m.with_mu(mu)),
            }
        }
    }

    fn attach_reference(&mut self, reference: &Reference) {
        // R gets a small margin for the reference's own inaccuracy
        let r = self.x0.sub(&reference.x).norm() + 1e-6;
        self.problem.r = r;
        self.problem.f_star = Some(reference.value);
        self.problem.x_star = None;
        if let Some(s) = &mut self.smooth {
            s.r = r;
        }
        for c in &mut self.components {
            c.r = r;
        }
    }
}

/// Runs the exact-model FGM for `iters` iterations from `x0` and from
/// `alt`, and accepts the better value when both agree to
/// [`REFERENCE_AGREEMENT`].
pub fn reference_optimum(gen: &Generated, alt: &Point, iters: usize) -> Result<Reference> {
    let mut best: Option<(Point, f64)> = None;
    let mut values = Vec::with_capacity(2);
    for start in [&gen.x0, alt] {
        let mut problem = gen.problem.clone();
        problem.r = f64::MAX.sqrt();
        problem.x_star = None;
        let mut model = gen.exact_model()?;
        let trace = run_fgm(&problem, &mut model, start, iters)?;
        let (x, v) = trace
            .records
            .iter()
            .map(|r| (&r.x, r.f_value))
            .fold((start, f64::INFINITY), |acc, (x, v)| if v < acc.1 { (x, v) } else { acc });
        values.push(v);
        if best.as_ref().is_none_or(|b| v < b.1) {
            best = Some((x.clone(), v));
        }
    }
    let disagreement = (values[0] - values[1]).abs();
    if disagreement > REFERENCE_AGREEMENT {
        return Err(Error::ReferenceDisagreement(disagreement));
    }
    let (x, value) = best.expect("two runs");
    Ok(Reference { x, value, disagreement })
}
