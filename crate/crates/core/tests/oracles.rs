//! Hand-computed examples and independent reference computations.

use std::sync::Arc;

use approx::assert_relative_eq;
use modelopt::functions::{LeastSquares, Quadratic};
use modelopt::harness::rates::estimate_rate;
use modelopt::harness::{gen_problem, ProblemSpec, SetSpec, Spectrum};
use modelopt::subproblem::{soft_threshold, AffinePiece, LinearPart, QuadTerm};
use modelopt::{
    alpha_next, linear_model, plan, run_fgm, run_gm, solve_prox, FeasibleSet, GradOracle, NoiseSpec, Objective,
    Point, Problem, ProxTask, Regularizer,
};
use nalgebra::DMatrix;

fn diag_problem(d: Vec<f64>) -> Problem {
    let n = d.len();
    let l = d.iter().cloned().fold(0.0, f64::max);
    let f = Quadratic::diagonal(d, Point::zeros(n)).unwrap();
    Problem::new(Arc::new(f), l, 0.0, FeasibleSet::full(n), (n as f64).sqrt())
        .unwrap()
        .with_minimizer(Point::zeros(n))
        .unwrap()
}

#[test]
fn projection_examples() {
    let b = FeasibleSet::boxed(Point::from([0.0, 0.0]), Point::from([1.0, 1.0])).unwrap();
    assert_eq!(b.project(&Point::from([2.0, -1.0])).unwrap(), Point::from([1.0, 0.0]));
    let ball = FeasibleSet::ball(Point::zeros(2), 1.0).unwrap();
    let p = ball.project(&Point::from([3.0, 4.0])).unwrap();
    assert_relative_eq!(p[0], 0.6, epsilon = 1e-15);
    assert_relative_eq!(p[1], 0.8, epsilon = 1e-15);
    let s = FeasibleSet::simplex(2);
    assert_eq!(s.project(&Point::from([2.0, 0.0])).unwrap(), Point::from([1.0, 0.0]));
    let p = s.project(&Point::from([0.5, 0.5])).unwrap();
    assert_eq!(p, Point::from([0.5, 0.5]));
}

#[test]
fn simplex_projection_matches_brute_force_grid() {
    let s = FeasibleSet::simplex(3);
    for z in [[0.3, -0.2, 1.4], [2.0, 2.0, -1.0], [0.1, 0.1, 0.1], [-3.0, 0.5, 0.2]] {
        let z = Point::from(z);
        let p = s.project(&z).unwrap();
        let steps = 400;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let c = Point::from([i as f64, j as f64, (steps - i - j) as f64]).scale(1.0 / steps as f64);
                best = best.min(c.sub(&z).norm_sq());
            }
        }
        let mine = p.sub(&z).norm_sq();
        assert!(mine <= best + 1e-12, "{mine} vs grid {best}");
        assert!(best - mine < 1e-4);
    }
}

#[test]
fn least_squares_gradient_matches_finite_differences() {
    let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, -1.0, 0.5, 0.3, -2.0]);
    let f = LeastSquares::new(a, vec![1.0, -1.0, 0.5]).unwrap();
    let x = Point::from([0.7, -0.4]);
    let g = f.gradient(&x).unwrap();
    let h = 1e-6;
    for i in 0..2 {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
        assert_relative_eq!(g[i], fd, epsilon = 1e-7);
    }
}

#[test]
fn batch_noise_variance_shrinks_with_batch() {
    let p = diag_problem(vec![1.0; 5]);
    let x = Point::from([1.0, 0.0, 0.0, 0.0, 0.0]);
    for (noise, r) in [(NoiseSpec::gaussian(2.0, 9), 1), (NoiseSpec::gaussian(2.0, 9), 8), (NoiseSpec::sphere(2.0, 4), 8)] {
        let mut o = GradOracle::new(p.clone(), noise, r).unwrap();
        let trials = 20_000;
        let mut sum = 0.0;
        for _ in 0..trials {
            let g = o.draw(&x).unwrap();
            sum += g.sub(&x).norm_sq();
        }
        let ratio = sum / trials as f64 / (4.0 / r as f64);
        assert!((ratio - 1.0).abs() < 0.05, "r = {r}: ratio {ratio}");
        assert_eq!(o.calls(), trials * r as u64);
    }
}

#[test]
fn sphere_noise_has_fixed_norm() {
    let p = diag_problem(vec![1.0; 4]);
    let x = Point::zeros(4);
    let mut o = GradOracle::new(p, NoiseSpec::sphere(0.5, 2), 1).unwrap();
    for _ in 0..100 {
        let g = o.draw(&x).unwrap();
        assert_relative_eq!(g.norm(), 0.5, epsilon = 1e-14);
    }
}

#[test]
fn alpha_examples() {
    let (a, next) = alpha_next(0.0, 0.0, 1.0).unwrap();
    assert_eq!((a, next), (1.0, 1.0));
    // L a^2 = A + a with A = 1, L = 1: a = golden ratio
    let (a, next) = alpha_next(1.0, 0.0, 1.0).unwrap();
    assert_relative_eq!(a, (1.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-15);
    assert_relative_eq!(next, 1.0 + a, epsilon = 1e-15);
    let (a, next) = alpha_next(2.0, 0.5, 4.0).unwrap();
    assert_relative_eq!(next * (1.0 + 2.0 * 0.5), 4.0 * a * a, max_relative = 1e-14);
    assert!(alpha_next(1.0, 2.0, 1.0).is_err());
}

#[test]
fn gm_on_diagonal_quadratic_contracts_each_coordinate() {
    let p = diag_problem(vec![1.0, 10.0]);
    let mut m = linear_model(GradOracle::exact(p.clone()));
    let t = run_gm(&p, &mut m, &Point::from([1.0, 1.0]), 100).unwrap();
    let x = &t.last().x;
    assert_relative_eq!(x[0], 0.9f64.powi(100), max_relative = 1e-12);
    assert!(x[1].abs() < 1e-300);
    assert_eq!(t.oracle_calls(), 100);
}

#[test]
fn fgm_first_step_is_a_gradient_step() {
    let p = diag_problem(vec![2.0, 4.0]);
    let mut m = linear_model(GradOracle::exact(p.clone()));
    let t = run_fgm(&p, &mut m, &Point::from([1.0, -1.0]), 1).unwrap();
    let x1 = &t.records[1].x;
    assert_relative_eq!(x1[0], 1.0 - 2.0 / 4.0, epsilon = 1e-12);
    assert_relative_eq!(x1[1], -1.0 + 4.0 / 4.0, epsilon = 1e-12);
    assert_relative_eq!(t.records[1].a_k, 0.25, epsilon = 1e-15);
}

#[test]
fn planner_examples() {
    let pl = plan(0.01, 1.0, 1.0, 1.0, 2).unwrap();
    assert_eq!((pl.n, pl.r, pl.predicted_calls), (10, 1000, 10_000));
    let pl = plan(0.01, 1.0, 1.0, 1.0, 1).unwrap();
    assert_eq!((pl.n, pl.r), (100, 100));
    let pl = plan(0.1, 1.0, 1.0, 0.0, 2).unwrap();
    assert_eq!((pl.n, pl.r), (4, 1));
    assert!(plan(0.1, 1.0, 1.0, 1.0, 3).is_err());
    assert!(plan(-1.0, 1.0, 1.0, 1.0, 2).is_err());
}

#[test]
fn l1_prox_matches_soft_threshold() {
    let c = Point::from([1.5, -0.2, 0.05, -3.0]);
    let g = Point::from([0.1, 0.2, -0.3, 0.0]);
    let (w, lam) = (2.0, 0.4);
    let task = ProxTask {
        linear: LinearPart::Single(AffinePiece { offset: 0.0, slope: g.clone() }),
        h: Regularizer::L1(lam),
        quad_terms: vec![QuadTerm { weight: w, center: c.clone() }],
        set: FeasibleSet::full(4),
    };
    let x = solve_prox(&task, 1e-12).unwrap().x;
    for i in 0..4 {
        assert_relative_eq!(x[i], soft_threshold(c[i] - g[i] / w, lam / w), epsilon = 1e-12);
    }
}

#[test]
fn bundle_prox_matches_grid_on_a_box() {
    let pieces = vec![
        AffinePiece { offset: 0.0, slope: Point::from([1.0, 0.5]) },
        AffinePiece { offset: 0.2, slope: Point::from([-1.0, 0.3]) },
        AffinePiece { offset: -0.1, slope: Point::from([0.2, -1.2]) },
    ];
    let task = ProxTask {
        linear: LinearPart::Bundle(pieces),
        h: Regularizer::Zero,
        quad_terms: vec![QuadTerm { weight: 1.5, center: Point::from([0.4, -0.7]) }],
        set: FeasibleSet::boxed(Point::from([-1.0, -1.0]), Point::from([1.0, 1.0])).unwrap(),
    };
    let sol = solve_prox(&task, 1e-10).unwrap();
    let best = (0..=800)
        .flat_map(|i| (0..=800).map(move |j| Point::from([-1.0 + i as f64 / 400.0, -1.0 + j as f64 / 400.0])))
        .map(|z| task.objective(&z))
        .fold(f64::INFINITY, f64::min);
    let mine = task.objective(&sol.x);
    assert!(mine <= best + 1e-10, "{mine} vs {best}");
    assert!(best - mine < 5e-3);
    // finer grid around the answer, clipped to the box
    let local = (0..=200)
        .flat_map(|i| (0..=200).map(move |j| (i, j)))
        .map(|(i, j)| {
            let z = Point::from([sol.x[0] + (i as f64 - 100.0) * 2e-5, sol.x[1] + (j as f64 - 100.0) * 2e-5]);
            task.set.project(&z).unwrap()
        })
        .map(|z| task.objective(&z))
        .fold(f64::INFINITY, f64::min);
    assert!(mine <= local + 1e-10, "{mine} vs {local}");
}

#[test]
fn max_model_psi_is_max_of_linearizations() {
    let spec = ProblemSpec::MaxQuadratics { m: 3, n: 2, l: 1.0, set: SetSpec::Full, reference_iters: 500, seed: 4 };
    let gen = gen_problem(&spec).unwrap();
    let mut model = gen.exact_model().unwrap();
    let x = Point::from([0.3, -0.1]);
    model.refresh(&x).unwrap();
    let fx = gen.problem.value(&x);
    for (i, j) in (0..=10).flat_map(|i| (0..=10).map(move |j| (i, j))) {
        let y = Point::from([-1.0 + 0.2 * i as f64, -1.0 + 0.2 * j as f64]);
        let expected = gen
            .components
            .iter()
            .map(|c| c.value(&x) + c.grad(&x).unwrap().dot(&y.sub(&x)))
            .fold(f64::NEG_INFINITY, f64::max)
            - fx;
        assert_relative_eq!(model.psi(&y).unwrap(), expected, epsilon = 1e-12);
    }
}

#[test]
fn rate_fit_recovers_known_exponents() {
    let gaps: Vec<f64> = (0..200).map(|k| if k == 0 { 1.0 } else { 3.0 / (k as f64).powf(1.5) }).collect();
    let fit = estimate_rate(&gaps, 10, 199).unwrap();
    assert_relative_eq!(fit.slope, -1.5, epsilon = 1e-12);
    assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
}

#[test]
fn fgm_on_ill_conditioned_quadratic_shows_quadratic_rate() {
    let spec = ProblemSpec::Quadratic {
        n: 200,
        l: 1.0,
        mu: 0.0,
        spectrum: Spectrum::Logspace,
        min_eigen: 1e-7,
        rotate: false,
        start_distance: 1.0,
        set: SetSpec::Full,
        seed: 2,
    };
    let gen = gen_problem(&spec).unwrap();
    let mut m = gen.exact_model().unwrap();
    let t = run_fgm(&gen.problem, &mut m, &gen.x0, 500).unwrap();
    let gaps = t.iterate_gaps(gen.problem.f_star.unwrap());
    let fit = estimate_rate(&gaps, 20, 500).unwrap();
    assert!((-2.6..=-1.7).contains(&fit.slope), "slope {}", fit.slope);
}
