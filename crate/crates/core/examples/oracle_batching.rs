//! Mini-batching divides the noise variance by the batch size.

use std::sync::Arc;

use modelopt::functions::Quadratic;
use modelopt::{FeasibleSet, GradOracle, NoiseSpec, Point, Problem};

fn main() -> modelopt::Result<()> {
    let n = 10;
    let f = Quadratic::diagonal(vec![1.0; n], Point::zeros(n))?;
    let problem = Problem::new(Arc::new(f), 1.0, 1.0, FeasibleSet::full(n), 1.0)?;
    let x = Point::from_fn(n, |i| i as f64 / n as f64);
    let exact = problem.grad(&x)?;
    let sigma = 0.5;
    for r in [1, 4, 16, 64] {
        let mut oracle = GradOracle::new(problem.clone(), NoiseSpec::gaussian(sigma, 42), r)?;
        let trials = 5000;
        let mean_sq: f64 = (0..trials)
            .map(|_| oracle.draw(&x).map(|g| g.sub(&exact).norm_sq()))
            .sum::<modelopt::Result<f64>>()?
            / trials as f64;
        println!(
            "r = {r:>2}: E||g - grad f||^2 = {mean_sq:.5}  (sigma^2/r = {:.5}), calls = {}",
            sigma * sigma / r as f64,
            oracle.calls()
        );
    }
    Ok(())
}
