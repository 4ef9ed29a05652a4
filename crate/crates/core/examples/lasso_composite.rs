//! FGM on a lasso problem through the composite model.

use modelopt::harness::generate::{gen_problem, ProblemSpec};
use modelopt::run_fgm;

fn main() -> modelopt::Result<()> {
    let gen = gen_problem(&ProblemSpec::Lasso { m: 100, n: 50, lambda: 0.1, reference_iters: 20_000, seed: 1 })?;
    let f_star = gen.problem.f_star.unwrap_or(f64::NAN);
    let trace = run_fgm(&gen.problem, &mut gen.exact_model()?, &gen.x0, 300)?;
    // once the gap reaches roundoff in f (about 1e-15 |f*|) the bound keeps
    // shrinking but the gap cannot follow
    for k in [0, 10, 25, 50, 100, 300] {
        let r = &trace.records[k];
        println!("k = {k:>3}: gap {:.3e}, bound {:.3e}", r.f_value - f_star, r.bound.unwrap_or(f64::NAN));
    }
    let x = &trace.output_point;
    let nonzero = x.iter().filter(|v| v.abs() > 1e-10).count();
    println!("f* = {f_star:.10}, {nonzero} of {} coordinates nonzero", x.dim());
    Ok(())
}
