//! The three prox subproblems: projected step, L1 soft-thresholding, and
//! a max-of-affine bundle on a box.

use modelopt::subproblem::{AffinePiece, LinearPart, QuadTerm};
use modelopt::{solve_prox, FeasibleSet, Point, ProxTask, Regularizer};

fn show(name: &str, task: &ProxTask) -> modelopt::Result<()> {
    let sol = solve_prox(task, 1e-10)?;
    println!(
        "{name:>10}: x = {:?}, value {:.6}, certified gap {:.1e}, {} iterations",
        sol.x.as_slice(),
        task.objective(&sol.x),
        sol.gap,
        sol.iterations
    );
    Ok(())
}

fn main() -> modelopt::Result<()> {
    let center = Point::from([0.8, -0.3]);
    let quad = vec![QuadTerm { weight: 2.0, center }];
    let g = AffinePiece { offset: 0.0, slope: Point::from([1.0, -1.0]) };

    show(
        "ball",
        &ProxTask {
            linear: LinearPart::Single(g.clone()),
            h: Regularizer::IndicatorOfQ,
            quad_terms: quad.clone(),
            set: FeasibleSet::ball(Point::zeros(2), 0.5)?,
        },
    )?;
    show(
        "l1",
        &ProxTask {
            linear: LinearPart::Single(g.clone()),
            h: Regularizer::L1(0.5),
            quad_terms: quad.clone(),
            set: FeasibleSet::full(2),
        },
    )?;
    let bundle = vec![
        g,
        AffinePiece { offset: 0.1, slope: Point::from([-1.0, 0.5]) },
        AffinePiece { offset: -0.2, slope: Point::from([0.3, 1.5]) },
    ];
    show(
        "bundle",
        &ProxTask {
            linear: LinearPart::Bundle(bundle),
            h: Regularizer::Zero,
            quad_terms: quad,
            set: FeasibleSet::boxed(Point::from([-1.0, -1.0]), Point::from([1.0, 1.0]))?,
        },
    )
}
