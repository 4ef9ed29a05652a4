//! Plan (N, r) for a target accuracy, then check the plan on a noisy
//! quadratic.

use modelopt::harness::generate::{gen_problem, ProblemSpec, SetSpec};
use modelopt::harness::stats::median;
use modelopt::{linear_model, plan, run_fgm, GradOracle, NoiseSpec};

fn main() -> modelopt::Result<()> {
    let gen = gen_problem(&ProblemSpec::Quadratic {
        n: 20,
        l: 1.0,
        mu: 0.0,
        spectrum: Default::default(),
        min_eigen: 1e-6,
        rotate: true,
        start_distance: 1.0,
        set: SetSpec::Full,
        seed: 5,
    })?;
    let (l, r_dist, sigma) = (gen.problem.l, gen.problem.r, 1.0);
    for eps in [0.1, 0.01] {
        let pl = plan(eps, l, r_dist, sigma, 2)?;
        let gaps: Vec<f64> = (0..20)
            .map(|seed| {
                let oracle = GradOracle::new(gen.problem.clone(), NoiseSpec::gaussian(sigma, seed), pl.r as usize)?;
                let t = run_fgm(&gen.problem, &mut linear_model(oracle), &gen.x0, pl.n as usize)?;
                Ok(t.output_gap.unwrap_or(f64::NAN))
            })
            .collect::<modelopt::Result<_>>()?;
        println!(
            "eps = {eps}: N = {}, r = {}, calls = {}, median gap over 20 seeds {:.3e}",
            pl.n,
            pl.r,
            pl.predicted_calls,
            median(&gaps)
        );
    }
    Ok(())
}
