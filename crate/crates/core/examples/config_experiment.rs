//! Runs a TOML experiment config and writes trace.csv and aggregate.json.
//!
//! `cargo run --example config_experiment -- crates/core/configs/stochastic_gm.toml`

use std::path::PathBuf;

use modelopt::harness::{run_experiment, ExperimentConfig};

fn main() -> modelopt::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/stochastic_gm.toml"));
    let cfg = ExperimentConfig::load(&path)?;
    let (exp, out) = run_experiment(&cfg)?;
    let agg = &exp.aggregate;
    println!("{} / {:?}: {} seeds, N = {}", agg.problem, agg.method, agg.runs.len(), agg.n_iter);
    let last = agg.quantiles.k.len() - 1;
    println!(
        "final gap quartiles: {:.3e} {:.3e} {:.3e}",
        agg.quantiles.q25[last], agg.quantiles.q50[last], agg.quantiles.q75[last]
    );
    match &agg.rate_fit {
        Some(f) => println!("median-curve slope {:.3} on {:?}", f.slope, f.window),
        None => println!("no rate fit: {}", agg.rate_fit_error.as_deref().unwrap_or("")),
    }
    for p in [out.csv, out.json].into_iter().flatten() {
        println!("wrote {}", p.display());
    }
    Ok(())
}
