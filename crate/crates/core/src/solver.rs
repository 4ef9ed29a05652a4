//! Gradient method, fast gradient method and small-step SGD on models.

use crate::error::{Error, Result};
use crate::model::Model;
use crate::oracle::GradOracle;
use crate::point::Point;
use crate::problem::Problem;
use crate::subproblem::{solve_prox, ProxTask, QuadTerm, DEFAULT_TOL};
use crate::trace::{Method, Record, Trace};

/// FGM stops once `A_k` would exceed this.
pub const A_LIMIT: f64 = 1e300;

/// Largest root of `L a^2 - (1 + A mu) a - A (1 + A mu) = 0`, i.e. the
/// step with `A_next (1 + A mu) = L a^2` and `A_next = A + a`.
/// Returns `(alpha, A_next)`.
pub fn alpha_next(a_k: f64, mu: f64, l: f64) -> Result<(f64, f64)> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::contract(format!("L = {l} must be > 0")));
    }
    if !(a_k >= 0.0) || !(mu >= 0.0 && mu <= l) {
        return Err(Error::contract(format!("need A >= 0 and 0 <= mu <= L, got A = {a_k}, mu = {mu}")));
    }
    let b = 1.0 + a_k * mu;
    // b (1 + sqrt(1 + 4 L A / b)) / 2L: no cancellation, and no b^2 to
    // overflow for large A
    let alpha = b * (1.0 + (1.0 + 4.0 * l * a_k / b).sqrt()) / (2.0 * l);
    Ok((alpha, a_k + alpha))
}

/// State of the gradient method after `k` steps.
#[derive(Debug, Clone)]
pub struct GmState {
    pub k: usize,
    pub x: Point,
    /// `sum_{i<=k} q^{k-i} x_i`
    pub weighted_sum: Point,
    /// `sum_{i<=k} q^{k-i}`
    pub weight_total: f64,
    pub q: f64,
}

impl GmState {
    pub fn new(x0: Point, l: f64, mu: f64) -> Self {
        let n = x0.dim();
        GmState {
            k: 0,
            x: x0,
            weighted_sum: Point::zeros(n),
            weight_total: 0.0,
            q: 1.0 - mu / l,
        }
    }

    /// `y_k`, the q-weighted average of `x_1..x_k`.
    pub fn average(&self) -> Option<Point> {
        (self.k > 0).then(|| self.weighted_sum.scale(1.0 / self.weight_total))
    }

    /// One step: refresh the model at `x_k` and minimize
    /// `psi(., x_k) + L/2 ||. - x_k||^2` over `Q`.
    pub fn step(&mut self, model: &mut Model, problem: &Problem) -> Result<()> {
        model.refresh(&self.x)?;
        let (linear, h) = model.prox_terms(1.0)?;
        let task = ProxTask {
            linear,
            h,
            quad_terms: vec![QuadTerm {
                weight: model.l_model(),
                center: self.x.clone(),
            }],
            set: problem.set.clone(),
        };
        let next = solve_prox(&task, DEFAULT_TOL)?.x;
        self.weight_total = self.q * self.weight_total + 1.0;
        self.weighted_sum = self.weighted_sum.scale(self.q);
        self.weighted_sum.axpy(1.0, &next);
        self.x = next;
        self.k += 1;
        Ok(())
    }
}

/// State of the fast gradient method after `k` steps.
#[derive(Debug, Clone)]
pub struct FgmState {
    pub k: usize,
    pub x: Point,
    pub u: Point,
    pub y: Point,
    pub a: f64,
    pub alpha: f64,
}

impl FgmState {
    pub fn new(x0: Point) -> Self {
        FgmState {
            k: 0,
            u: x0.clone(),
            y: x0.clone(),
            x: x0,
            a: 0.0,
            alpha: 0.0,
        }
    }

    /// One step. Returns `false` without changing state when `A_{k+1}`
    /// would exceed [`A_LIMIT`].
    pub fn step(&mut self, model: &mut Model, problem: &Problem) -> Result<bool> {
        let (l, mu) = (model.l_model(), model.mu_model());
        let (alpha, a_next) = alpha_next(self.a, mu, l)?;
        if !(a_next < A_LIMIT) {
            return Ok(false);
        }
        let y = Point::convex_combination(alpha, &self.u, self.a, &self.x);
        model.refresh(&y)?;
        let (linear, h) = model.prox_terms(alpha)?;
        let mut quad_terms = vec![QuadTerm {
            weight: 1.0 + self.a * mu,
            center: self.u.clone(),
        }];
        if mu > 0.0 {
            quad_terms.push(QuadTerm {
                weight: alpha * mu,
                center: y.clone(),
            });
        }
        let task = ProxTask {
            linear,
            h,
            quad_terms,
            set: problem.set.clone(),
        };
        let u = solve_prox(&task, DEFAULT_TOL)?.x;
        self.x = Point::convex_combination(alpha, &u, self.a, &self.x);
        self.u = u;
        self.y = y;
        self.a = a_next;
        self.alpha = alpha;
        self.k += 1;
        Ok(true)
    }
}

fn check_run(problem: &Problem, x0: &Point, n_iter: usize) -> Result<()> {
    if n_iter == 0 {
        return Err(Error::contract("N must be >= 1"));
    }
    problem.check_start(x0)
}

/// Runs `n_iter` steps of the gradient method. The output point is the
/// q-weighted average `y_N`; the last iterate is in the final record.
/// Each record carries the deterministic guarantee
/// `L R^2 / 2 * min(1/k, q^k)` for its averaged point.
pub fn run_gm(problem: &Problem, model: &mut Model, x0: &Point, n_iter: usize) -> Result<Trace> {
    check_run(problem, x0, n_iter)?;
    let l = model.l_model();
    let mut state = GmState::new(x0.clone(), l, model.mu_model());
    let mut records = vec![Record {
        k: 0,
        x: x0.clone(),
        u: None,
        y: None,
        f_value: problem.value(x0),
        f_avg: None,
        a_k: 0.0,
        alpha_k: 1.0 / l,
        oracle_calls: model.oracle_calls(),
        realized_delta2: None,
        bound: None,
    }];
    let scale = 0.5 * l * problem.r * problem.r;
    let mut q_pow = 1.0;
    for k in 0..n_iter {
        state.step(model, problem).map_err(|e| e.at(k))?;
        q_pow *= state.q;
        let y = state.average().expect("k >= 1");
        records.push(Record {
            k: k + 1,
            f_value: problem.value(&state.x),
            f_avg: Some(problem.value(&y)),
            x: state.x.clone(),
            u: None,
            y: Some(y),
            a_k: state.weight_total,
            alpha_k: 1.0 / l,
            oracle_calls: model.oracle_calls(),
            realized_delta2: Some(model.realized_delta2()?),
            bound: Some(scale * (1.0 / (k + 1) as f64).min(q_pow)),
        });
    }
    let output_point = state.average().expect("N >= 1");
    Ok(Trace {
        method: Method::Gm,
        output_gap: problem.gap(&output_point),
        output_point,
        records,
        truncated: None,
    })
}

/// Runs `n_iter` steps of the fast gradient method. The output point is
/// `x_N`; each record carries the deterministic guarantee `R^2 / (2 A_k)`.
pub fn run_fgm(problem: &Problem, model: &mut Model, x0: &Point, n_iter: usize) -> Result<Trace> {
    check_run(problem, x0, n_iter)?;
    let mut state = FgmState::new(x0.clone());
    let mut records = vec![Record {
        k: 0,
        x: x0.clone(),
        u: Some(x0.clone()),
        y: Some(x0.clone()),
        f_value: problem.value(x0),
        f_avg: None,
        a_k: 0.0,
        alpha_k: 0.0,
        oracle_calls: model.oracle_calls(),
        realized_delta2: None,
        bound: None,
    }];
    let r_sq = problem.r * problem.r;
    let mut truncated = None;
    for k in 0..n_iter {
        if !state.step(model, problem).map_err(|e| e.at(k))? {
            truncated = Some(format!("A_k would exceed {A_LIMIT:e} at iteration {k}; stopped"));
            break;
        }
        records.push(Record {
            k: k + 1,
            f_value: problem.value(&state.x),
            f_avg: None,
            x: state.x.clone(),
            u: Some(state.u.clone()),
            y: Some(state.y.clone()),
            a_k: state.a,
            alpha_k: state.alpha,
            oracle_calls: model.oracle_calls(),
            realized_delta2: Some(model.realized_delta2()?),
            bound: Some(r_sq / (2.0 * state.a)),
        });
    }
    let output_point = state.x;
    Ok(Trace {
        method: Method::Fgm,
        output_gap: problem.gap(&output_point),
        output_point,
        records,
        truncated,
    })
}

/// Projected SGD with a fixed step `h <= 1/L`, reporting the plain average
/// of `x_1..x_N`. Each stochastic gradient is a batch of the oracle's
/// configured size.
pub fn run_sgd_small_step(
    problem: &Problem,
    oracle: &mut GradOracle,
    h: f64,
    x0: &Point,
    n_iter: usize,
) -> Result<Trace> {
    if !(h > 0.0 && h <= 1.0 / problem.l) {
        return Err(Error::contract(format!(
            "step h = {h} must lie in (0, 1/L = {}]",
            1.0 / problem.l
        )));
    }
    check_run(problem, x0, n_iter)?;
    let mut x = x0.clone();
    let mut sum = Point::zeros(x0.dim());
    let mut records = vec![Record {
        k: 0,
        x: x0.clone(),
        u: None,
        y: None,
        f_value: problem.value(x0),
        f_avg: None,
        a_k: 0.0,
        alpha_k: h,
        oracle_calls: oracle.calls(),
        realized_delta2: None,
        bound: None,
    }];
    for k in 0..n_iter {
        let g = oracle.draw(&x).map_err(|e| e.at(k))?;
        x = problem.set.project(&x.add_scaled(-h, &g)).map_err(|e| e.at(k))?;
        sum.axpy(1.0, &x);
        let avg = sum.scale(1.0 / (k + 1) as f64);
        let delta2 = oracle.last_noise().map(|e| e.norm_sq() / (2.0 * problem.l));
        records.push(Record {
            k: k + 1,
            f_value: problem.value(&x),
            f_avg: Some(problem.value(&avg)),
            x: x.clone(),
            u: None,
            y: Some(avg),
            a_k: (k + 1) as f64,
            alpha_k: h,
            oracle_calls: oracle.calls(),
            realized_delta2: delta2,
            bound: None,
        });
    }
    let output_point = sum.scale(1.0 / n_iter as f64);
    Ok(Trace {
        method: Method::SgdSmallStep,
        output_gap: problem.gap(&output_point),
        output_point,
        records,
        truncated: None,
    })
}
