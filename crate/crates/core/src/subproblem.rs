//! Composite-quadratic prox subproblems
//!
//! ```text
//! min_{z in Q}  max_i { c_i + <g_i, z> } + h(z) + sum_j w_j/2 ||z - p_j||^2
//! ```
//!
//! Every step of the gradient and fast gradient methods reduces to one of
//! these. Quadratic terms are first aggregated into a single
//! `W/2 ||z - pbar||^2`, then the task is dispatched:
//!
//! * one affine piece, `h` zero or the indicator of `Q`: projection of
//!   `pbar - g/W` onto `Q` (exact);
//! * one affine piece, `h = lambda ||.||_1`, `Q` full space or a box:
//!   coordinatewise soft-thresholding then clipping (exact);
//! * a bundle of affine pieces, `h` zero or indicator: accelerated projected
//!   gradient ascent on the dual over the simplex of piece weights, stopped
//!   on a certified duality gap.

use crate::error::{check_dim, Error, Result};
use crate::point::Point;
use crate::problem::Regularizer;
use crate::set::{project_simplex, FeasibleSet};

/// Default suboptimality tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default iteration cap for the dual ascent.
pub const DUAL_MAX_ITER: usize = 100_000;

/// `offset + <slope, z>`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePiece {
    pub offset: f64,
    pub slope: Point,
}

impl AffinePiece {
    pub fn eval(&self, z: &Point) -> f64 {
        self.offset + self.slope.dot(z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinearPart {
    Single(AffinePiece),
    /// Pointwise maximum of affine pieces.
    Bundle(Vec<AffinePiece>),
}

impl LinearPart {
    pub fn eval(&self, z: &Point) -> f64 {
        match self {
            LinearPart::Single(p) => p.eval(z),
            LinearPart::Bundle(ps) => ps.iter().map(|p| p.eval(z)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        match self {
            LinearPart::Single(p) => std::slice::from_ref(p),
            LinearPart::Bundle(ps) => ps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadTerm {
    pub weight: f64,
    pub center: Point,
}

#[derive(Debug, Clone)]
pub struct ProxTask {
    pub linear: LinearPart,
    pub h: Regularizer,
    pub quad_terms: Vec<QuadTerm>,
    pub set: FeasibleSet,
}

/// Single-quadratic form of the aggregated terms.
#[derive(Debug, Clone)]
struct Aggregate {
    weight: f64,
    center: Point,
    constant: f64,
}

impl ProxTask {
    pub fn validate(&self) -> Result<()> {
        let n = self.set.dim();
        if self.quad_terms.is_empty() {
            return Err(Error::contract("prox task needs a quadratic term"));
        }
        let mut total = 0.0;
        for q in &self.quad_terms {
            check_dim(n, q.center.dim())?;
            if !(q.weight >= 0.0 && q.weight.is_finite()) {
                return Err(Error::contract(format!("quadratic weight {} must be >= 0", q.weight)));
            }
            if !q.center.is_finite() {
                return Err(Error::contract("quadratic center is not finite"));
            }
            total += q.weight;
        }
        if !(total > 0.0) {
            return Err(Error::contract("total quadratic weight must be > 0"));
        }
        let pieces = self.linear.pieces();
        if pieces.is_empty() {
            return Err(Error::contract("empty bundle"));
        }
        for p in pieces {
            check_dim(n, p.slope.dim())?;
            if !p.offset.is_finite() || !p.slope.is_finite() {
                return Err(Error::contract("affine piece is not finite"));
            }
        }
        self.h.validate()?;
        self.set.validate()
    }

    /// Objective value at `z` (the indicator of `Q` is not added).
    pub fn objective(&self, z: &Point) -> f64 {
        let quad: f64 = self
            .quad_terms
            .iter()
            .map(|q| 0.5 * q.weight * z.sub(&q.center).norm_sq())
            .sum();
        self.linear.eval(z) + self.h.value(z) + quad
    }

    pub fn total_weight(&self) -> f64 {
        self.quad_terms.iter().map(|q| q.weight).sum()
    }

    fn aggregate(&self) -> Aggregate {
        let weight = self.total_weight();
        let n = self.set.dim();
        let mut center = Point::zeros(n);
        for q in &self.quad_terms {
            center.axpy(q.weight / weight, &q.center);
        }
        let spread: f64 = self.quad_terms.iter().map(|q| 0.5 * q.weight * q.center.norm_sq()).sum();
        Aggregate {
            constant: spread - 0.5 * weight * center.norm_sq(),
            weight,
            center,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProxSolution {
    pub x: Point,
    /// Certified upper bound on `phi(x) - min phi` (0 for closed forms).
    pub gap: f64,
    /// Dual weights on the bundle pieces, for the bundle path.
    pub lambda: Option<Point>,
    pub iterations: usize,
}

/// Solves `task` to suboptimality `tol`.
pub fn solve_prox(task: &ProxTask, tol: f64) -> Result<ProxSolution> {
    if !(tol > 0.0) {
        return Err(Error::contract("tol must be > 0"));
    }
    task.validate()?;
    let agg = task.aggregate();
    let set = &task.set;
    let h = task.h;
    match (&task.linear, h) {
        (LinearPart::Single(piece), Regularizer::Zero | Regularizer::IndicatorOfQ) => {
            let target = agg.center.add_scaled(-1.0 / agg.weight, &piece.slope);
            Ok(ProxSolution {
                x: set.project(&target)?,
                gap: 0.0,
                lambda: None,
                iterations: 0,
            })
        }
        (LinearPart::Single(piece), Regularizer::L1(lambda)) => {
            let target = agg.center.add_scaled(-1.0 / agg.weight, &piece.slope);
            let thresh = lambda / agg.weight;
            let shrunk = Point::from_fn(target.dim(), |i| soft_threshold(target[i], thresh));
            match set {
                FeasibleSet::FullSpace(_) | FeasibleSet::Box { .. } => Ok(ProxSolution {
                    x: set.project(&shrunk)?,
                    gap: 0.0,
                    lambda: None,
                    iterations: 0,
                }),
                _ => Err(unsupported(task)),
            }
        }
        (LinearPart::Bundle(pieces), Regularizer::Zero | Regularizer::IndicatorOfQ) => {
            let dual = BundleDual {
                pieces,
                weight: agg.weight,
                center: &agg.center,
                set,
            };
            let res = dual_simplex_ascent(&dual, tol, DUAL_MAX_ITER)?;
            let effective = effective_tol(tol, res.scale);
            if res.gap > effective {
                return Err(Error::ToleranceNotReached {
                    gap: res.gap,
                    tol: effective,
                    iterations: res.iterations,
                });
            }
            Ok(ProxSolution {
                x: res.primal,
                gap: res.gap,
                lambda: Some(res.lambda),
                iterations: res.iterations,
            })
        }
        (LinearPart::Bundle(_), Regularizer::L1(_)) => Err(unsupported(task)),
    }
}

/// The constant dropped by aggregation; `phi(z) = reduced(z) + constant`.
pub fn aggregation_constant(task: &ProxTask) -> f64 {
    task.aggregate().constant
}

fn unsupported(task: &ProxTask) -> Error {
    let family = match task.linear {
        LinearPart::Single(_) => "single linear",
        LinearPart::Bundle(_) => "max-linear bundle",
    };
    let set = match task.set {
        FeasibleSet::FullSpace(_) => "full space",
        FeasibleSet::Box { .. } => "box",
        FeasibleSet::Ball { .. } => "ball",
        FeasibleSet::Simplex(_) => "simplex",
    };
    Error::Unsupported(format!(
        "{family} with {:?} on {set}; supported: single linear + (zero | indicator) on any set, \
         single linear + L1 on full space or box, max-linear bundle + (zero | indicator) on any set",
        task.h
    ))
}

pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Gap tolerance actually certifiable for a problem whose terms have
/// magnitude `scale`: never below a few hundred ulps of that scale.
fn effective_tol(tol: f64, scale: f64) -> f64 {
    tol.max(256.0 * f64::EPSILON * scale)
}

/// Dual of the bundle prox:
/// `max_{lambda in simplex} min_{z in Q} sum_i lambda_i (c_i + <g_i, z>) + W/2 ||z - pbar||^2`.
///
/// The inner minimizer is `z(lambda) = proj_Q(pbar - G lambda / W)` and the
/// dual gradient is `c_i + <g_i, z(lambda)>`, Lipschitz with constant
/// `||G||^2 / W`.
#[derive(Debug, Clone, Copy)]
pub struct BundleDual<'a> {
    pub pieces: &'a [AffinePiece],
    pub weight: f64,
    pub center: &'a Point,
    pub set: &'a FeasibleSet,
}

#[derive(Debug, Clone)]
pub struct DualResult {
    pub lambda: Point,
    pub primal: Point,
    /// `phi(primal) - d(lambda)`, an upper bound on primal suboptimality.
    pub gap: f64,
    pub iterations: usize,
    /// Magnitude of the terms entering the gap, including the cancellation
    /// in `G lambda / W`; bounds its roundoff.
    pub scale: f64,
}

#[derive(Clone)]
struct DualEval {
    primal: Point,
    dual_value: f64,
    primal_value: f64,
    grad: Vec<f64>,
    scale: f64,
}

impl BundleDual<'_> {
    fn combined_slope(&self, lambda: &[f64]) -> Point {
        let mut s = Point::zeros(self.center.dim());
        for (l, p) in lambda.iter().zip(self.pieces) {
            if *l != 0.0 {
                s.axpy(*l, &p.slope);
            }
        }
        s
    }

    fn eval(&self, lambda: &[f64]) -> Result<DualEval> {
        let s = self.combined_slope(lambda);
        let primal = self.set.project(&self.center.add_scaled(-1.0 / self.weight, &s))?;
        let quad = 0.5 * self.weight * primal.sub(self.center).norm_sq();
        let values: Vec<f64> = self.pieces.iter().map(|p| p.eval(&primal)).collect();
        let dual_value = lambda.iter().zip(&values).map(|(l, v)| l * v).sum::<f64>() + quad;
        let max_piece = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scale = quad
            + values.iter().map(|v| v.abs()).fold(0.0, f64::max)
            + self
                .pieces
                .iter()
                .map(|p| p.offset.abs() + p.slope.norm() * primal.norm())
                .fold(0.0, f64::max)
            // z is formed from sum lambda_i g_i / W, which may cancel
            + self.pieces.iter().map(|p| p.slope.norm_sq()).fold(0.0, f64::max) / self.weight;
        Ok(DualEval {
            primal_value: max_piece + quad,
            dual_value,
            grad: values,
            primal,
            scale,
        })
    }

    /// Gershgorin bound on the largest eigenvalue of the Gram matrix of the
    /// slopes, divided by `W`.
    pub fn lipschitz(&self) -> f64 {
        let m = self.pieces.len();
        let mut best = 0.0f64;
        for i in 0..m {
            let row: f64 = (0..m)
                .map(|j| self.pieces[i].slope.dot(&self.pieces[j].slope).abs())
                .sum();
            best = best.max(row);
        }
        best / self.weight
    }
}

/// Iterations between attempts to solve the dual exactly on a guessed
/// support.
const POLISH_EVERY: usize = 25;

/// Candidate dual points from exact solves on guessed supports.
///
/// With the support `S` of the pieces active at the optimum and the face of
/// `Q` containing the solution known, the optimality conditions are linear:
/// every piece in `S` takes the same value `t` at
/// `z = pbar - (G lambda + nu a) / W` on the free coordinates, and
/// `sum lambda = 1` (plus `sum z = 1` on a simplex face). On the boundary
/// of a ball the conditions are those of a full-space problem with weight
/// `W + nu` and center `(W pbar + nu c) / (W + nu)`, and `nu` is found by
/// bisection on `||z - c|| = radius`.
///
/// Guesses come from the support of `lambda` and from the pieces nearly
/// active at its primal point; a negative weight drops that piece and the
/// system is solved again. Candidates are only proposals: the caller keeps
/// one only if its certified gap is smaller.
fn polish_candidates(dual: &BundleDual<'_>, lambda: &[f64], e: &DualEval) -> Vec<Vec<f64>> {
    let n = dual.center.dim();
    let m = dual.pieces.len();
    let top = lambda.iter().cloned().fold(0.0, f64::max);
    let by_weight: Vec<usize> = (0..m).filter(|&i| lambda[i] > 1e-6 * top).collect();
    let max_val = e.grad.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let by_value: Vec<usize> = (0..m)
        .filter(|&i| e.grad[i] >= max_val - 1e-6 * e.scale.max(f64::MIN_POSITIVE))
        .collect();
    let all: Vec<usize> = (0..n).collect();
    let face = |free: Vec<usize>, sum_one: bool| Face {
        weight: dual.weight,
        center: dual.center.clone(),
        free,
        fixed: e.primal.clone(),
        sum_one,
    };
    let mut out = Vec::new();
    for mut support in [by_weight, by_value] {
        while !support.is_empty() {
            let weights = match dual.set {
                FeasibleSet::FullSpace(_) => face(all.clone(), false).solve(dual.pieces, &support),
                FeasibleSet::Box { lower, upper } => face(
                    (0..n).filter(|&j| e.primal[j] > lower[j] && e.primal[j] < upper[j]).collect(),
                    false,
                )
                .solve(dual.pieces, &support),
                FeasibleSet::Simplex(_) => {
                    face((0..n).filter(|&j| e.primal[j] > 0.0).collect(), true).solve(dual.pieces, &support)
                }
                FeasibleSet::Ball { center, radius } => {
                    if e.primal.sub(center).norm() < radius * (1.0 - 1e-12) {
                        face(all.clone(), false).solve(dual.pieces, &support)
                    } else {
                        ball_boundary(dual, &support, center, *radius)
                    }
                }
            };
            let Some((weights, _)) = weights else { break };
            let (worst, &w) = weights
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("nonempty support");
            if w >= 0.0 {
                let mut full = vec![0.0; m];
                for (&i, &v) in support.iter().zip(&weights) {
                    full[i] = v;
                }
                out.push(full);
                break;
            }
            support.remove(worst);
        }
    }
    out
}

/// A face of `Q` on which the prox optimality conditions are linear.
struct Face {
    weight: f64,
    center: Point,
    /// Coordinates not held at a bound.
    free: Vec<usize>,
    /// Values of the held coordinates (other entries unused).
    fixed: Point,
    /// Free coordinates must sum to one minus the held ones.
    sum_one: bool,
}

impl Face {
    /// Weights on `support` and the resulting point.
    fn solve(&self, pieces: &[AffinePiece], support: &[usize]) -> Option<(Vec<f64>, Point)> {
        use nalgebra::{DMatrix, DVector};
        let n = self.center.dim();
        let s = support.len();
        let w = self.weight;
        let is_free: Vec<bool> = (0..n).map(|j| self.free.contains(&j)).collect();
        let start = Point::from_fn(n, |j| if is_free[j] { self.center[j] } else { self.fixed[j] });
        let a: Vec<f64> = support
            .iter()
            .map(|&i| self.free.iter().map(|&j| pieces[i].slope[j]).sum::<f64>() / w)
            .collect();
        let dim = s + 1 + usize::from(self.sum_one);
        let mut k = DMatrix::<f64>::zeros(dim, dim);
        let mut rhs = DVector::<f64>::zeros(dim);
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                let dot: f64 = self.free.iter().map(|&q| pieces[i].slope[q] * pieces[j].slope[q]).sum();
                k[(r, c)] = dot / w;
            }
            k[(r, s)] = 1.0;
            k[(s, r)] = 1.0;
            rhs[r] = pieces[i].eval(&start);
        }
        rhs[s] = 1.0;
        if self.sum_one {
            for r in 0..s {
                k[(r, s + 1)] = a[r];
                k[(s + 1, r)] = a[r];
            }
            k[(s + 1, s + 1)] = self.free.len() as f64 / w;
            let held: f64 = (0..n).filter(|&j| !is_free[j]).map(|j| self.fixed[j]).sum();
            rhs[s + 1] = self.free.iter().map(|&j| self.center[j]).sum::<f64>() - 1.0 + held;
        }
        // block scaling: the Gram block and the multiplier rows can differ
        // in scale by many orders of magnitude
        let tau = (0..s)
            .flat_map(|r| (0..s).map(move |c| (r, c)))
            .fold(0.0f64, |acc, (r, c)| acc.max(k[(r, c)].abs()));
        let tau = if tau > 0.0 { tau } else { 1.0 };
        let a_max = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut d = vec![1.0 / tau.sqrt(); dim];
        d[s] = tau.sqrt();
        if self.sum_one {
            d[s + 1] = if a_max > 0.0 { tau.sqrt() / a_max } else { (w / self.free.len().max(1) as f64).sqrt() };
        }
        let scaled = DMatrix::from_fn(dim, dim, |r, c| d[r] * k[(r, c)] * d[c]);
        let svd = scaled.svd(true, true);
        let cutoff = 1e-12 * svd.singular_values.max();
        let y = svd.solve(&DVector::from_fn(dim, |r, _| d[r] * rhs[r]), cutoff).ok()?;
        let sol = DVector::from_fn(dim, |r, _| d[r] * y[r]);
        let weights: Vec<f64> = sol.iter().take(s).cloned().collect();
        if !weights.iter().all(|v| v.is_finite()) {
            return None;
        }
        let nu = if self.sum_one { sol[s + 1] } else { 0.0 };
        let mut z = start;
        for &j in &self.free {
            let g: f64 = support.iter().zip(&weights).map(|(&i, l)| l * pieces[i].slope[j]).sum();
            z[j] -= (g + nu) / w;
        }
        Some((weights, z))
    }
}

fn ball_boundary(dual: &BundleDual<'_>, support: &[usize], c: &Point, radius: f64) -> Option<(Vec<f64>, Point)> {
    let n = c.dim();
    let at = |nu: f64| {
        let wt = dual.weight + nu;
        let center = Point::from_fn(n, |j| (dual.weight * dual.center[j] + nu * c[j]) / wt);
        Face {
            weight: wt,
            center,
            free: (0..n).collect(),
            fixed: Point::zeros(n),
            sum_one: false,
        }
        .solve(dual.pieces, support)
    };
    let outside = |nu: f64| at(nu).map(|(_, z)| z.sub(c).norm() > radius);
    let (mut lo, mut hi) = (0.0, dual.weight.max(1.0));
    if outside(lo) != Some(true) {
        return None;
    }
    while outside(hi)? {
        hi *= 2.0;
        if hi > 1e300 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if outside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(hi)
}

/// Accelerated projected gradient ascent on the simplex-constrained dual
/// with step `1 / L_dual` and function-value restarts, interleaved with
/// exact solves on guessed supports (full space, box, and ball with an
/// interior solution). Returns the best
/// iterate found; `gap` certifies its quality. Stops when
/// `gap <= tol` (or the roundoff floor) or after `max_iter` iterations.
pub fn dual_simplex_ascent(dual: &BundleDual<'_>, tol: f64, max_iter: usize) -> Result<DualResult> {
    let m = dual.pieces.len();
    if m == 0 {
        return Err(Error::contract("empty bundle"));
    }
    let finish = |lambda: Vec<f64>, e: DualEval, iterations: usize| DualResult {
        lambda: Point::from(lambda),
        gap: (e.primal_value - e.dual_value).max(0.0),
        primal: e.primal,
        iterations,
        scale: e.scale,
    };
    if m == 1 {
        let e = dual.eval(&[1.0])?;
        return Ok(finish(vec![1.0], e, 0));
    }
    let lip = dual.lipschitz();
    if !(lip > 0.0) {
        // all slopes vanish: the dual is linear, maximized at a vertex
        let best = dual
            .pieces
            .iter()
            .enumerate()
            .fold(0, |b, (i, p)| if p.offset > dual.pieces[b].offset { i } else { b });
        let mut lambda = vec![0.0; m];
        lambda[best] = 1.0;
        let e = dual.eval(&lambda)?;
        return Ok(finish(lambda, e, 0));
    }
    let step = 1.0 / lip;

    let mut lambda = vec![1.0 / m as f64; m];
    let mut current = dual.eval(&lambda)?;
    let mut best_lambda = lambda.clone();
    let mut best_gap = current.primal_value - current.dual_value;
    let mut best_eval = current.clone();

    let mut extrapolated = lambda.clone();
    let mut extrap_eval_grad = current.grad.clone();
    let mut t = 1.0f64;

    for it in 1..=max_iter {
        let ascent: Vec<f64> = extrapolated
            .iter()
            .zip(&extrap_eval_grad)
            .map(|(l, g)| l + step * g)
            .collect();
        let next = project_simplex(&Point::from(ascent)).into_vec();
        let next_eval = dual.eval(&next)?;

        let gap = next_eval.primal_value - next_eval.dual_value;
        if gap < best_gap {
            best_gap = gap;
            best_lambda = next.clone();
            best_eval = next_eval.clone();
        }
        if it % POLISH_EVERY == 1 && best_gap > effective_tol(tol, best_eval.scale) {
            for cand in polish_candidates(dual, &best_lambda, &best_eval) {
                let e = dual.eval(&cand)?;
                let g = e.primal_value - e.dual_value;
                if g < best_gap {
                    best_gap = g;
                    best_lambda = cand;
                    best_eval = e;
                }
            }
        }
        if best_gap <= effective_tol(tol, best_eval.scale) {
            return Ok(finish(best_lambda, best_eval, it));
        }

        if next_eval.dual_value < current.dual_value {
            // restart momentum
            t = 1.0;
            extrapolated = lambda.clone();
            extrap_eval_grad = current.grad.clone();
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        extrapolated = next
            .iter()
            .zip(&lambda)
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        extrap_eval_grad = dual.eval(&extrapolated)?.grad;
        t = t_next;
        lambda = next;
        current = next_eval;
    }
    Ok(finish(best_lambda, best_eval, max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(weight: f64, center: Point) -> Vec<QuadTerm> {
        vec![QuadTerm { weight, center }]
    }

    #[test]
    fn single_linear_gradient_step() {
        let task = ProxTask {
            linear: LinearPart::Single(AffinePiece {
                offset: 0.0,
                slope: Point::from([1.0, 0.0]),
            }),
            h: Regularizer::Zero,
            quad_terms: quad(1.0, Point::from([2.0, 0.0])),
            set: FeasibleSet::full(2),
        };
        let sol = solve_prox(&task, DEFAULT_TOL).unwrap();
        assert_eq!(sol.x.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn l1_soft_threshold() {
        let task = ProxTask {
            linear: LinearPart::Single(AffinePiece {
                offset: 0.0,
                slope: Point::zeros(2),
            }),
            h: Regularizer::L1(1.0),
            quad_terms: quad(1.0, Point::from([2.0, -0.5])),
            set: FeasibleSet::full(2),
        };
        let sol = solve_prox(&task, DEFAULT_TOL).unwrap();
        assert_eq!(sol.x.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn singleton_bundle() {
        let pieces = vec![AffinePiece {
            offset: 0.3,
            slope: Point::from([1.0]),
        }];
        let center = Point::from([0.0]);
        let set = FeasibleSet::full(1);
        let dual = BundleDual {
            pieces: &pieces,
            weight: 1.0,
            center: &center,
            set: &set,
        };
        let r = dual_simplex_ascent(&dual, DEFAULT_TOL, 10).unwrap();
        assert_eq!(r.lambda.as_slice(), &[1.0]);
        assert_eq!(r.gap, 0.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn symmetric_two_planes() {
        let pieces = vec![
            AffinePiece {
                offset: 0.0,
                slope: Point::from([1.0]),
            },
            AffinePiece {
                offset: 0.0,
                slope: Point::from([-1.0]),
            },
        ];
        let center = Point::from([0.0]);
        let set = FeasibleSet::full(1);
        let dual = BundleDual {
            pieces: &pieces,
            weight: 1.0,
            center: &center,
            set: &set,
        };
        let r = dual_simplex_ascent(&dual, DEFAULT_TOL, 1000).unwrap();
        assert!((r.lambda[0] - 0.5).abs() < 1e-12);
        assert!((r.lambda[1] - 0.5).abs() < 1e-12);
        assert!(r.gap <= DEFAULT_TOL);
        assert!(r.primal[0].abs() < 1e-12);
    }

    #[test]
    fn unsupported_combinations() {
        let ball = FeasibleSet::ball(Point::zeros(2), 1.0).unwrap();
        let task = ProxTask {
            linear: LinearPart::Single(AffinePiece {
                offset: 0.0,
                slope: Point::zeros(2),
            }),
            h: Regularizer::L1(1.0),
            quad_terms: quad(1.0, Point::from([2.0, -0.5])),
            set: ball,
        };
        let err = solve_prox(&task, DEFAULT_TOL).unwrap_err();
        match err {
            Error::Unsupported(msg) => assert!(msg.contains("supported:")),
            other => panic!("unexpected {other:?}"),
        }
        let bundle_l1 = ProxTask {
            linear: LinearPart::Bundle(vec![AffinePiece {
                offset: 0.0,
                slope: Point::zeros(2),
            }]),
            set: FeasibleSet::full(2),
            ..task
        };
        assert!(matches!(solve_prox(&bundle_l1, DEFAULT_TOL), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rejects_zero_total_weight() {
        let task = ProxTask {
            linear: LinearPart::Single(AffinePiece {
                offset: 0.0,
                slope: Point::zeros(1),
            }),
            h: Regularizer::Zero,
            quad_terms: quad(0.0, Point::zeros(1)),
            set: FeasibleSet::full(1),
        };
        assert!(matches!(solve_prox(&task, DEFAULT_TOL), Err(Error::Contract(_))));
    }

    #[test]
    fn aggregation_preserves_objective() {
        let task = ProxTask {
            linear: LinearPart::Single(AffinePiece {
                offset: 0.5,
                slope: Point::from([1.0, -2.0]),
            }),
            h: Regularizer::Zero,
            quad_terms: vec![
                QuadTerm {
                    weight: 2.0,
                    center: Point::from([1.0, 0.0]),
                },
                QuadTerm {
                    weight: 0.5,
                    center: Point::from([-1.0, 3.0]),
                },
            ],
            set: FeasibleSet::full(2),
        };
        let agg = task.aggregate();
        let z = Point::from([0.3, -0.7]);
        let reduced = task.linear.eval(&z) + 0.5 * agg.weight * z.sub(&agg.center).norm_sq();
        assert!((reduced + agg.constant - task.objective(&z)).abs() < 1e-12);
    }
}
