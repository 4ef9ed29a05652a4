//! GM and FGM on an ill-conditioned quadratic: observed gaps against the
//! deterministic bounds, and the fitted rate exponents.

use modelopt::harness::generate::{gen_problem, ProblemSpec, SetSpec, Spectrum};
use modelopt::harness::rates::estimate_rate;
use modelopt::{run_fgm, run_gm};

fn main() -> modelopt::Result<()> {
    let gen = gen_problem(&ProblemSpec::Quadratic {
        n: 200,
        l: 1.0,
        mu: 0.0,
        spectrum: Spectrum::Logspace,
        min_eigen: 1e-7,
        rotate: false,
        start_distance: 1.0,
        set: SetSpec::Full,
        seed: 1,
    })?;
    let f_star = gen.problem.f_star.unwrap_or(0.0);
    let n = 500;
    let gm = run_gm(&gen.problem, &mut gen.exact_model()?, &gen.x0, n)?;
    let fgm = run_fgm(&gen.problem, &mut gen.exact_model()?, &gen.x0, n)?;

    println!("{:>5} {:>12} {:>12} {:>12} {:>12}", "k", "GM gap", "GM bound", "FGM gap", "FGM bound");
    for k in [1, 10, 50, 100, 250, 500] {
        let (a, b) = (&gm.records[k], &fgm.records[k]);
        println!(
            "{k:>5} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}",
            a.f_avg.unwrap_or(a.f_value) - f_star,
            a.bound.unwrap_or(f64::NAN),
            b.f_value - f_star,
            b.bound.unwrap_or(f64::NAN)
        );
    }
    let gm_fit = estimate_rate(&gm.output_gaps(f_star), 20, n)?;
    let fgm_fit = estimate_rate(&fgm.output_gaps(f_star), 20, n)?;
    println!("slopes on [20, {n}]: GM {:.3}, FGM {:.3}", gm_fit.slope, fgm_fit.slope);
    Ok(())
}
