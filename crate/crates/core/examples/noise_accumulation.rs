//! With a fixed noise level, FGM's error floor grows with N while GM's
//! stays flat.

use modelopt::harness::generate::{gen_problem, ProblemSpec, SetSpec, Spectrum};
use modelopt::harness::stats::median;
use modelopt::{linear_model, run_fgm, run_gm, GradOracle, NoiseSpec};

fn main() -> modelopt::Result<()> {
    let gen = gen_problem(&ProblemSpec::Quadratic {
        n: 50,
        l: 1.0,
        mu: 0.0,
        spectrum: Spectrum::Logspace,
        min_eigen: 1e-4,
        rotate: false,
        start_distance: 1.0,
        set: SetSpec::Full,
        seed: 3,
    })?;
    let f_star = gen.problem.f_star.unwrap_or(0.0);
    let sigma = 0.1;
    println!("{:>6} {:>14} {:>14}", "N", "GM last iterate", "FGM");
    for n in [100, 400, 1600] {
        let mut gm = Vec::new();
        let mut fgm = Vec::new();
        for seed in 0..10 {
            let oracle = || GradOracle::new(gen.problem.clone(), NoiseSpec::gaussian(sigma, seed), 1);
            gm.push(run_gm(&gen.problem, &mut linear_model(oracle()?), &gen.x0, n)?.last().f_value - f_star);
            fgm.push(run_fgm(&gen.problem, &mut linear_model(oracle()?), &gen.x0, n)?.last().f_value - f_star);
        }
        println!("{n:>6} {:>14.3e} {:>14.3e}", median(&gm), median(&fgm));
    }
    Ok(())
}
