//! Inexact `(delta, L)`-models of the objective.
//!
//! A model is a function `psi(y, x)`, convex in `y` with `psi(x, x) = 0`,
//! that sandwiches the objective:
//!
//! ```text
//! f(x) + psi(y, x) + mu/2 ||y - x||^2 - delta1  <=  f(y)
//!     <=  f(x) + psi(y, x) + L/2 ||y - x||^2 + delta2
//! ```
//!
//! All three families here have the form
//! `psi(y, x) = max_i { a_i + <g_i, y - x> } + h(y) - h(x)` with `a_i <= 0`
//! and `max_i a_i = 0`, where the `g_i` are (batched) stochastic gradients
//! drawn once per [`Model::refresh`]. With noise present the smoothness
//! constant of the sandwich is doubled, absorbing the cross term
//! `<eta, y - x>` into `delta2 = ||eta||^2 / (2L)`.

use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::oracle::GradOracle;
use crate::point::Point;
use crate::problem::{Objective, Problem, Regularizer};
use crate::subproblem::{AffinePiece, LinearPart};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    Linear,
    Composite,
    MaxLinear,
}

pub struct CompositeSpec {
    /// Oracle of the smooth part `f`.
    pub smooth_oracle: GradOracle,
    pub h: Regularizer,
}

pub struct SmoothComponent {
    pub objective: Arc<dyn Objective>,
    /// Oracle for this component; streams must be independent across
    /// components.
    pub oracle: GradOracle,
}

pub struct MaxSmoothSpec {
    pub components: Vec<SmoothComponent>,
    /// Common bound on the components' gradient Lipschitz constants.
    pub l_shared: f64,
}

enum Source {
    Single(GradOracle),
    Max(Vec<SmoothComponent>),
}

/// Linearization data cached by the last refresh.
#[derive(Debug, Clone)]
struct Cache {
    center: Point,
    /// `(a_i, g_i)`
    pieces: Vec<(f64, Point)>,
    h_center: f64,
    noise: Vec<Point>,
}

pub struct Model {
    family: ModelFamily,
    source: Source,
    h: Regularizer,
    base_l: f64,
    l_model: f64,
    mu_model: f64,
    cache: Option<Cache>,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model")
            .field("family", &self.family)
            .field("h", &self.h)
            .field("l_model", &self.l_model)
            .field("mu_model", &self.mu_model)
            .finish()
    }
}

/// Linear model `psi(y, x) = <g(x), y - x>` for a (batched) stochastic
/// gradient `g`. `L_model` is `2L` when the oracle is noisy, `L` otherwise.
pub fn linear_model(oracle: GradOracle) -> Model {
    let p = oracle.problem();
    let (l, mu) = (p.l, p.mu);
    let noisy = !oracle.noise().kind.is_none();
    Model {
        family: ModelFamily::Linear,
        source: Source::Single(oracle),
        h: Regularizer::Zero,
        base_l: l,
        l_model: if noisy { 2.0 * l } else { l },
        mu_model: mu,
        cache: None,
    }
}

/// Composite model `psi(y, x) = <g(x), y - x> + h(y) - h(x)`.
pub fn composite_model(spec: CompositeSpec) -> Result<Model> {
    spec.h.validate()?;
    let mut m = linear_model(spec.smooth_oracle);
    m.family = ModelFamily::Composite;
    m.h = spec.h;
    Ok(m)
}

/// Max-of-linearizations model
/// `psi(y, x) = max_i { f_i(x) + <g_i(x), y - x> } - max_i f_i(x)`,
/// with `L_model = 2 L_shared`.
pub fn max_smooth_model(spec: MaxSmoothSpec) -> Result<Model> {
    if spec.components.is_empty() {
        return Err(Error::contract("max-smooth model needs at least one component"));
    }
    if !(spec.l_shared > 0.0 && spec.l_shared.is_finite()) {
        return Err(Error::contract("L_shared must be > 0"));
    }
    let n = spec.components[0].objective.dim();
    for c in &spec.components {
        check_dim(n, c.objective.dim())?;
        check_dim(n, c.oracle.problem().dim())?;
    }
    Ok(Model {
        family: ModelFamily::MaxLinear,
        source: Source::Max(spec.components),
        h: Regularizer::Zero,
        base_l: spec.l_shared,
        l_model: 2.0 * spec.l_shared,
        mu_model: 0.0,
        cache: None,
    })
}

impl Model {
    /// Use the undoubled smoothness constant (for ablations).
    pub fn without_doubling(mut self) -> Self {
        self.l_model = self.base_l;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu_model = mu;
        self
    }

    pub fn family(&self) -> ModelFamily {
        self.family
    }

    pub fn l_model(&self) -> f64 {
        self.l_model
    }

    /// Smoothness constant of the underlying function(s), before doubling.
    pub fn base_l(&self) -> f64 {
        self.base_l
    }

    pub fn mu_model(&self) -> f64 {
        self.mu_model
    }

    pub fn h(&self) -> Regularizer {
        self.h
    }

    pub fn center(&self) -> Option<&Point> {
        self.cache.as_ref().map(|c| &c.center)
    }

    pub fn oracle_calls(&self) -> u64 {
        match &self.source {
            Source::Single(o) => o.calls(),
            Source::Max(cs) => cs.iter().map(|c| c.oracle.calls()).sum(),
        }
    }

    /// Draws fresh linearization data at `x`.
    pub fn refresh(&mut self, x: &Point) -> Result<()> {
        let h_center = self.h.value(x);
        let cache = match &mut self.source {
            Source::Single(oracle) => {
                let g = oracle.draw(x)?;
                let noise = oracle.last_noise().cloned().unwrap_or_else(|| Point::zeros(x.dim()));
                Cache {
                    center: x.clone(),
                    pieces: vec![(0.0, g)],
                    h_center,
                    noise: vec![noise],
                }
            }
            Source::Max(components) => {
                let mut values = Vec::with_capacity(components.len());
                let mut grads = Vec::with_capacity(components.len());
                let mut noise = Vec::with_capacity(components.len());
                for c in components.iter_mut() {
                    values.push(c.objective.value(x));
                    grads.push(c.oracle.draw(x)?);
                    noise.push(c.oracle.last_noise().cloned().unwrap_or_else(|| Point::zeros(x.dim())));
                }
                let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                Cache {
                    center: x.clone(),
                    pieces: values.into_iter().map(|v| v - top).zip(grads).collect(),
                    h_center,
                    noise,
                }
            }
        };
        self.cache = Some(cache);
        Ok(())
    }

    fn cache(&self) -> Result<&Cache> {
        self.cache
            .as_ref()
            .ok_or_else(|| Error::contract("model used before refresh"))
    }

    /// `psi(y, x)` at the center `x` of the last refresh.
    pub fn psi(&self, y: &Point) -> Result<f64> {
        let c = self.cache()?;
        check_dim(c.center.dim(), y.dim())?;
        let d = y.sub(&c.center);
        let top = c
            .pieces
            .iter()
            .map(|(a, g)| a + g.dot(&d))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(top + self.h.value(y) - c.h_center)
    }

    /// Cached stochastic gradients, one per piece.
    pub fn gradients(&self) -> Result<Vec<&Point>> {
        Ok(self.cache()?.pieces.iter().map(|(_, g)| g).collect())
    }

    /// Noise realized by the last refresh, one vector per piece.
    pub fn realized_noise(&self) -> Result<&[Point]> {
        Ok(&self.cache()?.noise)
    }

    /// `delta2 = max_i ||eta_i||^2 / (2 L)` for the last refresh.
    pub fn realized_delta2(&self) -> Result<f64> {
        let c = self.cache()?;
        let worst = c.noise.iter().map(|e| e.norm_sq()).fold(0.0, f64::max);
        Ok(worst / (2.0 * self.base_l))
    }

    /// `delta1(y, x) = max_i <eta_i, y - x>` for the last refresh.
    pub fn realized_delta1(&self, y: &Point) -> Result<f64> {
        let c = self.cache()?;
        let d = y.sub(&c.center);
        Ok(c.noise.iter().map(|e| e.dot(&d)).fold(f64::NEG_INFINITY, f64::max))
    }

    /// `scale * psi(., x)` as the linear part of a prox task, in absolute
    /// coordinates, plus the correspondingly scaled `h`.
    pub fn prox_terms(&self, scale: f64) -> Result<(LinearPart, Regularizer)> {
        let c = self.cache()?;
        let pieces: Vec<AffinePiece> = c
            .pieces
            .iter()
            .map(|(a, g)| AffinePiece {
                offset: scale * (a - g.dot(&c.center)),
                slope: g.scale(scale),
            })
            .collect();
        let linear = match self.family {
            ModelFamily::MaxLinear => LinearPart::Bundle(pieces),
            _ => LinearPart::Single(pieces.into_iter().next().expect("one piece")),
        };
        let h = match self.h {
            Regularizer::L1(lambda) => Regularizer::L1(scale * lambda),
            other => other,
        };
        Ok((linear, h))
    }
}

/// Realized sandwich residuals at one `(y, x)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichPair {
    /// `max(0, f(x) + psi(y,x) + mu/2 ||y-x||^2 - f(y))`
    pub lower: f64,
    /// `max(0, f(y) - f(x) - psi(y,x) - L_model/2 ||y-x||^2)`
    pub upper: f64,
    /// Realized `max_i <eta_i, y - x>`.
    pub delta1: f64,
    /// Realized `max_i ||eta_i||^2 / (2L)`.
    pub delta2: f64,
}

#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub pairs: Vec<SandwichPair>,
    pub max_lower: f64,
    pub max_upper: f64,
    pub mean_lower: f64,
    pub mean_upper: f64,
    /// Largest `lower - max(delta1, 0)`; nonpositive when every lower
    /// residual is covered by its realized `delta1`.
    pub max_lower_excess: f64,
    /// Largest `upper - delta2`.
    pub max_upper_excess: f64,
}

/// Refreshes `model` at each `x` and measures both sides of the sandwich
/// against the exact objective of `problem`.
pub fn verify_model_sandwich(
    model: &mut Model,
    problem: &Problem,
    pairs: &[(Point, Point)],
) -> Result<SandwichReport> {
    let mut out = Vec::with_capacity(pairs.len());
    for (y, x) in pairs {
        model.refresh(x)?;
        let fx = problem.value(x);
        let fy = problem.value(y);
        let psi = model.psi(y)?;
        let d2 = y.sub(x).norm_sq();
        out.push(SandwichPair {
            lower: (fx + psi + 0.5 * model.mu_model * d2 - fy).max(0.0),
            upper: (fy - fx - psi - 0.5 * model.l_model * d2).max(0.0),
            delta1: model.realized_delta1(y)?,
            delta2: model.realized_delta2()?,
        });
    }
    let count = out.len().max(1) as f64;
    Ok(SandwichReport {
        max_lower: out.iter().map(|p| p.lower).fold(0.0, f64::max),
        max_upper: out.iter().map(|p| p.upper).fold(0.0, f64::max),
        mean_lower: out.iter().map(|p| p.lower).sum::<f64>() / count,
        mean_upper: out.iter().map(|p| p.upper).sum::<f64>() / count,
        max_lower_excess: out
            .iter()
            .map(|p| p.lower - p.delta1.max(0.0))
            .fold(f64::NEG_INFINITY, f64::max),
        max_upper_excess: out
            .iter()
            .map(|p| p.upper - p.delta2)
            .fold(f64::NEG_INFINITY, f64::max),
        pairs: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::Quadratic;
    use crate::oracle::NoiseSpec;
    use crate::set::FeasibleSet;

    fn half_norm_sq(n: usize) -> Problem {
        let q = Quadratic::diagonal(vec![1.0; n], Point::zeros(n)).unwrap();
        Problem::new(Arc::new(q), 1.0, 0.0, FeasibleSet::full(n), 1.0).unwrap()
    }

    #[test]
    fn exact_linearization() {
        let mut m = linear_model(GradOracle::exact(half_norm_sq(2)));
        assert_eq!(m.l_model(), 1.0);
        let x = Point::from([1.0, 0.0]);
        m.refresh(&x).unwrap();
        assert_eq!(m.psi(&Point::zeros(2)).unwrap(), -1.0);
        assert_eq!(m.psi(&x).unwrap(), 0.0);
    }

    #[test]
    fn noisy_model_doubles_l() {
        let o = GradOracle::new(half_norm_sq(2), NoiseSpec::gaussian(1.0, 3), 1).unwrap();
        let m = linear_model(o);
        assert_eq!(m.l_model(), 2.0);
        assert_eq!(m.without_doubling().l_model(), 1.0);
    }

    #[test]
    fn psi_before_refresh_is_an_error() {
        let m = linear_model(GradOracle::exact(half_norm_sq(2)));
        assert!(m.psi(&Point::zeros(2)).is_err());
    }

    #[test]
    fn composite_pure_regularizer() {
        let spec = CompositeSpec {
            smooth_oracle: GradOracle::exact(half_norm_sq(2)),
            h: Regularizer::L1(1.0),
        };
        let mut m = composite_model(spec).unwrap();
        m.refresh(&Point::zeros(2)).unwrap();
        // g = grad at 0 = 0
        assert_eq!(m.psi(&Point::from([1.0, -2.0])).unwrap(), 3.0);
    }

    #[test]
    fn max_model_needs_components() {
        let spec = MaxSmoothSpec {
            components: vec![],
            l_shared: 1.0,
        };
        assert!(max_smooth_model(spec).is_err());
    }
}
