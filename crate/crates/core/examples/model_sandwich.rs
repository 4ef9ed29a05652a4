//! Two-sided model inequality for the three model families, measured
//! on random point pairs.

use modelopt::harness::generate::{gen_problem, ProblemSpec, SetSpec};
use modelopt::{linear_model, verify_model_sandwich, GradOracle, NoiseSpec, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pairs(n: usize, count: usize, seed: u64) -> Vec<(Point, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = || Point::from_fn(n, |_| rng.random_range(-1.0..1.0));
    (0..count).map(|_| (p(), p())).collect()
}

fn main() -> modelopt::Result<()> {
    let quad = gen_problem(&ProblemSpec::Quadratic {
        n: 10,
        l: 2.0,
        mu: 0.1,
        spectrum: Default::default(),
        min_eigen: 1e-6,
        rotate: true,
        start_distance: 1.0,
        set: SetSpec::Full,
        seed: 1,
    })?;
    let oracle = GradOracle::new(quad.problem.clone(), NoiseSpec::gaussian(0.3, 7), 1)?;
    let mut noisy = linear_model(oracle);
    let report = verify_model_sandwich(&mut noisy, &quad.problem, &pairs(10, 500, 1))?;
    println!(
        "linear, sigma 0.3: max lower {:.3e} (excess over delta1 {:.1e}), max upper {:.3e} (excess over delta2 {:.1e})",
        report.max_lower, report.max_lower_excess, report.max_upper, report.max_upper_excess
    );

    let lasso = gen_problem(&ProblemSpec::Lasso { m: 30, n: 10, lambda: 0.1, reference_iters: 2000, seed: 2 })?;
    let mut exact = lasso.exact_model()?;
    let report = verify_model_sandwich(&mut exact, &lasso.problem, &pairs(10, 500, 2))?;
    println!("composite, exact: max lower {:.1e}, max upper {:.1e}", report.max_lower, report.max_upper);

    let maxq = gen_problem(&ProblemSpec::MaxQuadratics {
        m: 3,
        n: 5,
        l: 1.0,
        set: SetSpec::Full,
        reference_iters: 2000,
        seed: 3,
    })?;
    let mut exact = maxq.exact_model()?;
    let report = verify_model_sandwich(&mut exact, &maxq.problem, &pairs(5, 500, 3))?;
    println!("max-linear, exact: max lower {:.1e}, max upper {:.1e}", report.max_lower, report.max_upper);
    Ok(())
}
