//! Property tests for projections, models and the prox subproblem.

use std::sync::Arc;

use modelopt::functions::Quadratic;
use modelopt::subproblem::{AffinePiece, LinearPart, QuadTerm};
use modelopt::{
    linear_model, solve_prox, FeasibleSet, GradOracle, NoiseSpec, Point, Problem, ProxTask, Regularizer,
};
use proptest::prelude::*;

const N: usize = 3;

fn point() -> impl Strategy<Value = Point> {
    prop::collection::vec(-3.0..3.0f64, N).prop_map(Point::from)
}

fn set() -> impl Strategy<Value = FeasibleSet> {
    prop_oneof![
        Just(FeasibleSet::full(N)),
        Just(FeasibleSet::boxed(Point::from([-1.0, 0.0, -0.5]), Point::from([1.0, 2.0, 0.5])).unwrap()),
        (point(), 0.1..2.0f64).prop_map(|(c, r)| FeasibleSet::ball(c, r).unwrap()),
        Just(FeasibleSet::simplex(N)),
    ]
}

fn quad_problem(d: Vec<f64>) -> Problem {
    let l = d.iter().cloned().fold(0.0, f64::max);
    let f = Quadratic::diagonal(d, Point::from([0.5, -0.5, 1.0])).unwrap();
    Problem::new(Arc::new(f), l, 0.0, FeasibleSet::full(N), 10.0).unwrap()
}

fn piece() -> impl Strategy<Value = AffinePiece> {
    (-1.0..1.0f64, point()).prop_map(|(offset, slope)| AffinePiece { offset, slope })
}

fn prox_task() -> impl Strategy<Value = ProxTask> {
    (
        prop::collection::vec(piece(), 1..4),
        prop_oneof![Just(Regularizer::Zero), (0.0..1.0f64).prop_map(Regularizer::L1)],
        0.2..5.0f64,
        point(),
        set(),
    )
        .prop_map(|(pieces, h, w, c, set)| {
            // L1 is only supported with a single piece on the full space or a box
            let l1_ok = pieces.len() == 1 && matches!(set, FeasibleSet::FullSpace(_) | FeasibleSet::Box { .. });
            let h = if l1_ok { h } else { Regularizer::Zero };
            ProxTask {
                linear: if pieces.len() == 1 {
                    LinearPart::Single(pieces[0].clone())
                } else {
                    LinearPart::Bundle(pieces)
                },
                h,
                quad_terms: vec![QuadTerm { weight: w, center: c }],
                set,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projection_is_idempotent_and_feasible(s in set(), z in point()) {
        let p = s.project(&z).unwrap();
        prop_assert!(s.contains(&p));
        let pp = s.project(&p).unwrap();
        prop_assert!(pp.sub(&p).norm() <= 1e-12);
    }

    #[test]
    fn projection_is_nonexpansive(s in set(), a in point(), b in point()) {
        let (pa, pb) = (s.project(&a).unwrap(), s.project(&b).unwrap());
        prop_assert!(pa.sub(&pb).norm() <= a.sub(&b).norm() + 1e-12);
    }

    #[test]
    fn projection_satisfies_variational_inequality(s in set(), z in point(), w in point()) {
        let p = s.project(&z).unwrap();
        let q = s.project(&w).unwrap();
        prop_assert!(z.sub(&p).dot(&q.sub(&p)) <= 1e-10);
    }

    #[test]
    fn linear_model_vanishes_at_center_and_is_convex(
        d in prop::collection::vec(0.1..5.0f64, N),
        x in point(), y in point(), z in point(), seed in 0u64..1000,
    ) {
        let p = quad_problem(d);
        let mut m = linear_model(GradOracle::new(p, NoiseSpec::gaussian(0.7, seed), 2).unwrap());
        m.refresh(&x).unwrap();
        prop_assert!(m.psi(&x).unwrap().abs() <= 1e-12);
        let mid = Point::convex_combination(0.5, &y, 0.5, &z);
        let lhs = m.psi(&mid).unwrap();
        let rhs = 0.5 * m.psi(&y).unwrap() + 0.5 * m.psi(&z).unwrap();
        prop_assert!(lhs <= rhs + 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn realized_delta1_is_homogeneous(
        d in prop::collection::vec(0.1..5.0f64, N),
        x in point(), y in point(), t in 0.01..10.0f64, seed in 0u64..1000,
    ) {
        let p = quad_problem(d);
        let mut m = linear_model(GradOracle::new(p, NoiseSpec::sphere(1.0, seed), 1).unwrap());
        m.refresh(&x).unwrap();
        let d1 = m.realized_delta1(&y).unwrap();
        let yt = x.add_scaled(t, &y.sub(&x));
        let dt = m.realized_delta1(&yt).unwrap();
        prop_assert!((dt - t * d1).abs() <= 1e-10 * (1.0 + (t * d1).abs()));
    }

    #[test]
    fn prox_solution_is_feasible_and_strongly_optimal(task in prox_task(), zs in prop::collection::vec(point(), 8)) {
        let sol = solve_prox(&task, 1e-10).unwrap();
        prop_assert!(task.set.contains(&sol.x));
        let w = task.total_weight();
        let fx = task.objective(&sol.x);
        for z in zs {
            let z = task.set.project(&z).unwrap();
            let lhs = task.objective(&z);
            let rhs = fx + 0.5 * w * z.sub(&sol.x).norm_sq();
            // exact when the gap is zero; a certified gap g costs sqrt(2 g w) * dist + g
            let slack = sol.gap + (2.0 * sol.gap * w).sqrt() * z.sub(&sol.x).norm() + 1e-9 * (1.0 + lhs.abs());
            prop_assert!(lhs >= rhs - slack, "lhs {} rhs {} gap {}", lhs, rhs, sol.gap);
        }
    }

    #[test]
    fn one_piece_bundle_agrees_with_single(p in piece(), w in 0.2..5.0f64, c in point(), s in set()) {
        let single = ProxTask {
            linear: LinearPart::Single(p.clone()),
            h: Regularizer::Zero,
            quad_terms: vec![QuadTerm { weight: w, center: c.clone() }],
            set: s.clone(),
        };
        let bundle = ProxTask { linear: LinearPart::Bundle(vec![p]), ..single.clone() };
        let a = solve_prox(&single, 1e-12).unwrap().x;
        let b = solve_prox(&bundle, 1e-12).unwrap().x;
        prop_assert!(a.sub(&b).norm() <= 1e-5, "{:?} vs {:?}", a, b);
    }
}
