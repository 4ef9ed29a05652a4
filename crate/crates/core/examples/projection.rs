//! Euclidean projections onto the supported feasible sets.

use modelopt::{FeasibleSet, Point};

fn main() -> modelopt::Result<()> {
    let z = Point::from([2.0, -0.5, 0.7]);
    let sets = [
        ("full space", FeasibleSet::full(3)),
        ("box [0,1]^3", FeasibleSet::boxed(Point::zeros(3), Point::from([1.0; 3]))?),
        ("unit ball", FeasibleSet::ball(Point::zeros(3), 1.0)?),
        ("simplex", FeasibleSet::simplex(3)),
    ];
    println!("z = {:?}", z.as_slice());
    for (name, set) in &sets {
        let p = set.project(&z)?;
        println!("{name:>12}: {:?}  (distance {:.4})", p.as_slice(), p.sub(&z).norm());
    }
    Ok(())
}
