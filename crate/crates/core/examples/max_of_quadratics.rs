//! A nonsmooth maximum of quadratics on a box, solved through the
//! max-linear model with exact and noisy component gradients.

use modelopt::harness::generate::gen_problem;
use modelopt::harness::ExperimentConfig;
use modelopt::harness::experiment::build_model;
use modelopt::run_fgm;

const CONFIG: &str = r#"
seeds = [1]

[problem]
family = "max-quadratics"
m = 4
n = 10
l = 1.0
set = { kind = "box", lower = -1.0, upper = 1.0 }
seed = 8

[model]
family = "max-linear"
noise = { kind = "gaussian-isotropic", sigma = 0.05 }

[solver]
method = "fgm"
n_iter = 200

[output]
dir = "unused"
"#;

fn main() -> modelopt::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let gen = gen_problem(&cfg.problem)?;
    let f_star = gen.problem.f_star.unwrap_or(f64::NAN);
    let exact = run_fgm(&gen.problem, &mut gen.exact_model()?, &gen.x0, 200)?;
    let noisy = run_fgm(&gen.problem, &mut build_model(&cfg, &gen, 1)?, &gen.x0, 200)?;
    for k in [10, 50, 100, 200] {
        println!(
            "k = {k:>3}: exact gap {:.3e}, noisy gap {:.3e}",
            exact.records[k].f_value - f_star,
            noisy.records[k].f_value - f_star
        );
    }
    let active: Vec<f64> = gen.components.iter().map(|c| c.value(&exact.output_point)).collect();
    println!("component values at the output point: {active:.6?}");
    Ok(())
}
