//! Seeded experiment runs, CSV traces and JSON aggregates.
//!
//! The problem instance is generated once from the config; each seed keys
//! the noise streams of one run. Runs are independent and may execute on
//! several threads (`MODELOPT_WORKERS`, default 1); results are always
//! ordered by seed, so outputs do not depend on the worker count.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, ModelKind, OutputFormat, SolverKind};
use super::generate::{gen_problem, Generated};
use super::rates::{estimate_rate, RateFit};
use super::stats::quantile;
use crate::error::{Error, Result};
use crate::model::{composite_model, linear_model, max_smooth_model, CompositeSpec, MaxSmoothSpec, Model, SmoothComponent};
use crate::oracle::{GradOracle, NoiseSpec};
use crate::solver::{run_fgm, run_gm, run_sgd_small_step};
use crate::trace::{Method, Trace};

/// Environment variable holding the number of worker threads.
pub const WORKERS_ENV: &str = "MODELOPT_WORKERS";

/// Absolute slack (scaled by `max(1, |f*|)`) for the per-run bound checks.
pub const BOUND_SLACK: f64 = 1e-9;

pub const CSV_HEADER: [&str; 7] = ["k", "f_gap", "f_gap_avg_point", "A_k", "alpha_k", "oracle_calls", "seed"];

#[derive(Debug, Clone)]
pub struct RunResult {
    pub seed: u64,
    pub trace: Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub holds: bool,
    /// Largest `gap_k - bound_k` over the run.
    pub max_violation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub output_gap: f64,
    /// Gap of the last iterate `x_N`.
    pub last_iterate_gap: f64,
    pub oracle_calls: u64,
    pub iterations: usize,
    pub truncated: Option<String>,
    /// Present for noise-free GM and FGM runs.
    pub bound_check: Option<BoundCheck>,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct GapQuantiles {
    pub k: Vec<usize>,
    pub q25: Vec<f64>,
    pub q50: Vec<f64>,
    pub q75: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub problem: String,
    pub method: Method,
    pub n_iter: usize,
    pub f_star: f64,
    pub r: f64,
    pub runs: Vec<RunSummary>,
    /// Quantiles over seeds of the output-point gap at each `k`.
    pub quantiles: GapQuantiles,
    pub rate_fit: Option<RateFit>,
    pub rate_fit_error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub runs: Vec<RunResult>,
    pub aggregate: Aggregate,
}

/// Paths written by [`run_experiment`].
#[derive(Debug, Clone, Default)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// Builds the model for one seed; component oracles of a max model use
/// streams `0..m` of the seed.
pub fn build_model(cfg: &ExperimentConfig, gen: &Generated, seed: u64) -> Result<Model> {
    let noise = NoiseSpec {
        kind: cfg.model.noise,
        seed,
    };
    let batch = cfg.model.batch;
    let model = match cfg.model.family {
        ModelKind::Linear | ModelKind::Composite => {
            let smooth = gen
                .smooth
                .clone()
                .ok_or_else(|| Error::Unsupported(format!("{:?} model needs a smooth part", cfg.model.family)))?;
            let mu = smooth.mu;
            let oracle = GradOracle::new(smooth, noise, batch)?;
            let m = if cfg.model.family == ModelKind::Linear {
                linear_model(oracle)
            } else {
                composite_model(CompositeSpec {
                    smooth_oracle: oracle,
                    h: gen.h,
                })?
            };
            m.with_mu(mu)
        }
        ModelKind::MaxLinear => {
            if gen.components.is_empty() {
                return Err(Error::Unsupported("max-linear model needs a max-type problem".into()));
            }
            let components = gen
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    Ok(SmoothComponent {
                        objective: c.objective.clone(),
                        oracle: GradOracle::with_stream(c.clone(), noise, batch, i as u64)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            max_smooth_model(MaxSmoothSpec {
                components,
                l_shared: gen.problem.l,
            })?
            .with_mu(gen.problem.mu)
        }
    };
    Ok(if cfg.model.double_l { model } else { model.without_doubling() })
}

/// Default SGD step `min(1/L, R / (sigma_r sqrt(N)))` with
/// `sigma_r = sigma / sqrt(batch)`.
pub fn sgd_step(cfg: &ExperimentConfig, gen: &Generated) -> f64 {
    if let Some(h) = cfg.solver.step {
        return h;
    }
    let p = &gen.problem;
    let sigma_r = cfg.model.noise.sigma() / (cfg.model.batch as f64).sqrt();
    let cap = 1.0 / p.l;
    if sigma_r > 0.0 {
        cap.min(p.r / (sigma_r * (cfg.solver.n_iter as f64).sqrt()))
    } else {
        cap
    }
}

pub fn run_seed(cfg: &ExperimentConfig, gen: &Generated, seed: u64) -> Result<Trace> {
    let n = cfg.solver.n_iter;
    match cfg.solver.method {
        SolverKind::Gm => run_gm(&gen.problem, &mut build_model(cfg, gen, seed)?, &gen.x0, n),
        SolverKind::Fgm => run_fgm(&gen.problem, &mut build_model(cfg, gen, seed)?, &gen.x0, n),
        SolverKind::SgdSmallStep => {
            let smooth = gen
                .smooth
                .clone()
                .ok_or_else(|| Error::Unsupported("sgd-small-step needs a smooth problem".into()))?;
            let noise = NoiseSpec {
                kind: cfg.model.noise,
                seed,
            };
            let mut oracle = GradOracle::new(smooth, noise, cfg.model.batch)?;
            run_sgd_small_step(&gen.problem, &mut oracle, sgd_step(cfg, gen), &gen.x0, n)
        }
    }
}

fn workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1)
}

/// Generates the problem and runs every seed, without writing anything.
pub fn execute(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let gen = gen_problem(&cfg.problem)?;
    // surface unsupported combinations before any run
    if cfg.solver.method != SolverKind::SgdSmallStep {
        build_model(cfg, &gen, cfg.seeds[0])?;
    }
    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();
    let run = |&seed: &u64| run_seed(cfg, &gen, seed).map(|trace| RunResult { seed, trace });
    let runs = match workers() {
        1 => seeds.iter().map(run).collect::<Result<Vec<_>>>()?,
        w => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(format!("{WORKERS_ENV}: {e}")))?;
            pool.install(|| seeds.par_iter().map(run).collect::<Result<Vec<_>>>())?
        }
    };
    let aggregate = aggregate(cfg, &gen, &runs);
    Ok(Experiment { runs, aggregate })
}

fn bound_check(trace: &Trace, f_star: f64) -> BoundCheck {
    let slack = BOUND_SLACK * f_star.abs().max(1.0);
    let max_violation = trace
        .records
        .iter()
        .filter_map(|r| r.bound.map(|b| r.f_avg.unwrap_or(r.f_value) - f_star - b))
        .fold(f64::NEG_INFINITY, f64::max);
    BoundCheck {
        holds: !(max_violation > slack),
        max_violation,
    }
}

fn aggregate(cfg: &ExperimentConfig, gen: &Generated, runs: &[RunResult]) -> Aggregate {
    let f_star = gen.problem.f_star.unwrap_or(f64::NAN);
    let noiseless = cfg.model.noise.is_none();
    let summaries = runs
        .iter()
        .map(|r| {
            let t = &r.trace;
            let last = t.last();
            RunSummary {
                seed: r.seed,
                output_gap: t.output_gap.unwrap_or(f64::NAN),
                last_iterate_gap: last.f_value - f_star,
                oracle_calls: t.oracle_calls(),
                iterations: last.k,
                truncated: t.truncated.clone(),
                bound_check: (noiseless && t.method != Method::SgdSmallStep).then(|| bound_check(t, f_star)),
            }
        })
        .collect();
    let curves: Vec<Vec<f64>> = runs.iter().map(|r| r.trace.output_gaps(f_star)).collect();
    let len = curves.iter().map(Vec::len).min().unwrap_or(0);
    let mut q = GapQuantiles::default();
    for k in 0..len {
        let at_k: Vec<f64> = curves.iter().map(|c| c[k]).collect();
        q.k.push(k);
        q.q25.push(quantile(&at_k, 0.25));
        q.q50.push(quantile(&at_k, 0.5));
        q.q75.push(quantile(&at_k, 0.75));
    }
    let n = cfg.solver.n_iter;
    let (k_min, k_max) = cfg.analysis.rate_window.unwrap_or(((n / 10).max(1), n));
    let (rate_fit, rate_fit_error) = match estimate_rate(&q.q50, k_min, k_max) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Aggregate {
        problem: cfg.problem.family().to_string(),
        method: runs.first().map(|r| r.trace.method).unwrap_or(Method::Gm),
        n_iter: n,
        f_star,
        r: gen.problem.r,
        runs: summaries,
        quantiles: q,
        rate_fit,
        rate_fit_error,
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the per-iteration rows of `runs` (already in seed order).
pub fn write_csv<W: Write>(out: W, runs: &[RunResult], f_star: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for run in runs {
        let seed = run.seed.to_string();
        for r in &run.trace.records {
            let avg = r.f_avg.map(|v| fmt(v - f_star)).unwrap_or_default();
            w.write_record([
                r.k.to_string(),
                fmt(r.f_value - f_star),
                avg,
                fmt(r.a_k),
                fmt(r.alpha_k),
                r.oracle_calls.to_string(),
                seed.clone(),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

impl Experiment {
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<Outputs> {
        fs::create_dir_all(dir)?;
        let mut out = Outputs::default();
        if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
            let path = dir.join("trace.csv");
            let file = fs::File::create(&path)?;
            write_csv(std::io::BufWriter::new(file), &self.runs, self.aggregate.f_star)?;
            out.csv = Some(path);
        }
        if matches!(format, OutputFormat::Json | OutputFormat::Both) {
            let path = dir.join("aggregate.json");
            let text = serde_json::to_string_pretty(&self.aggregate).map_err(|e| Error::Io(e.to_string()))?;
            fs::write(&path, text + "\n")?;
            out.json = Some(path);
        }
        Ok(out)
    }
}

/// Runs the experiment and writes its outputs under `cfg.output.dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(Experiment, Outputs)> {
    let exp = execute(cfg)?;
    let out = exp.write(&cfg.output.dir, cfg.output.format)?;
    Ok((exp, out))
}

/// Per-seed and median-curve rate fits of a trace CSV.
#[derive(Debug, Clone, Serialize)]
pub struct CsvRates {
    pub per_seed: Vec<(u64, std::result::Result<RateFit, String>)>,
    pub median: std::result::Result<RateFit, String>,
}

/// Reads a trace CSV and fits the output-point gap (`f_gap_avg_point`
/// where present, else `f_gap`) over `window`, or `[max(1, K/10), K]`.
pub fn rates_from_csv(path: &Path, window: Option<(usize, usize)>) -> Result<CsvRates> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(|e| Error::Config(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Config(format!(
            "{}: expected columns {}",
            path.display(),
            CSV_HEADER.join(",")
        )));
    }
    let mut series: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for (line, rec) in reader.records().enumerate() {
        let bad = |what: &str| Error::Config(format!("{}: row {}: bad {what}", path.display(), line + 2));
        let rec = rec.map_err(|e| Error::Config(e.to_string()))?;
        let k: usize = rec[0].parse().map_err(|_| bad("k"))?;
        let gap_field = if rec[2].is_empty() { &rec[1] } else { &rec[2] };
        let gap: f64 = gap_field.parse().map_err(|_| bad("gap"))?;
        let seed: u64 = rec[6].parse().map_err(|_| bad("seed"))?;
        let s = series.entry(seed).or_default();
        if s.len() != k {
            return Err(bad("k sequence"));
        }
        s.push(gap);
    }
    if series.is_empty() {
        return Err(Error::Config(format!("{}: no rows", path.display())));
    }
    let len = series.values().map(Vec::len).min().unwrap_or(0);
    let last = len.saturating_sub(1);
    let (lo, hi) = window.unwrap_or(((last / 10).max(1), last));
    let fit = |g: &[f64]| estimate_rate(g, lo, hi).map_err(|e| e.to_string());
    let per_seed = series.iter().map(|(&s, g)| (s, fit(g))).collect();
    let median: Vec<f64> = (0..len)
        .map(|k| quantile(&series.values().map(|g| g[k]).collect::<Vec<_>>(), 0.5))
        .collect();
    Ok(CsvRates {
        per_seed,
        median: fit(&median),
    })
}
