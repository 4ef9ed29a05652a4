//! Iteration count and batch size for a target accuracy.
//!
//! For a method of order `p` (1 for GM, 2 for FGM) with stochastic
//! gradients of variance `sigma^2`, the error after `N` iterations with
//! batch `r` has three terms
//!
//! ```text
//! L R^2 / N^p,   sigma_r R / sqrt(N),   N^{p-1} sigma_r^2 / L,   sigma_r^2 = sigma^2 / r
//! ```
//!
//! and the plan makes each of them about `eps`:
//! `N = ceil((L R^2/eps)^{1/p})`,
//! `r = max(1, ceil(sigma^2/(L eps) (L R^2/eps)^{(p-1)/p}))`.
//! All hidden constants are 1 and logarithmic factors are dropped, so a
//! plan is a heuristic to be checked empirically, not a certified bound.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plan {
    pub n: u64,
    pub r: u64,
    pub p: u32,
    pub eps: f64,
    pub predicted_calls: u64,
    pub diagnostics: PlanDiagnostics,
}

/// The three error terms evaluated at the planned `(N, r)`, each divided
/// by `eps`, and their maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanDiagnostics {
    pub deterministic: f64,
    pub stochastic: f64,
    pub accumulation: f64,
    pub max_ratio: f64,
}

pub fn plan(eps: f64, l: f64, r_dist: f64, sigma: f64, p: u32) -> Result<Plan> {
    if p != 1 && p != 2 {
        return Err(Error::contract(format!("order p = {p} must be 1 or 2")));
    }
    for (name, v) in [("eps", eps), ("L", l), ("R", r_dist)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::contract(format!("{name} = {v} must be > 0")));
        }
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::contract(format!("sigma = {sigma} must be >= 0")));
    }
    let pf = p as f64;
    let ratio = l * r_dist * r_dist / eps;
    let n = ratio.powf(1.0 / pf).ceil().max(1.0);
    let r = (sigma * sigma / (l * eps) * ratio.powf((pf - 1.0) / pf))
        .ceil()
        .max(1.0);
    let sigma_r_sq = sigma * sigma / r;
    let deterministic = l * r_dist * r_dist / n.powf(pf) / eps;
    let stochastic = sigma_r_sq.sqrt() * r_dist / n.sqrt() / eps;
    let accumulation = n.powf(pf - 1.0) * sigma_r_sq / l / eps;
    let (n, r) = (n as u64, r as u64);
    Ok(Plan {
        n,
        r,
        p,
        eps,
        predicted_calls: n * r,
        diagnostics: PlanDiagnostics {
            deterministic,
            stochastic,
            accumulation,
            max_ratio: deterministic.max(stochastic).max(accumulation),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accelerated_example() {
        let pl = plan(0.01, 1.0, 1.0, 1.0, 2).unwrap();
        assert_eq!((pl.n, pl.r, pl.predicted_calls), (10, 1000, 10_000));
    }

    #[test]
    fn plain_example() {
        let pl = plan(0.01, 1.0, 1.0, 1.0, 1).unwrap();
        assert_eq!((pl.n, pl.r, pl.predicted_calls), (100, 100, 10_000));
    }

    #[test]
    fn deterministic_regime_has_unit_batch() {
        for eps in [1.0, 0.1, 1e-3, 1e-6] {
            assert_eq!(plan(eps, 2.0, 3.0, 0.0, 2).unwrap().r, 1);
            assert_eq!(plan(eps, 2.0, 3.0, 0.0, 1).unwrap().r, 1);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(plan(0.01, 1.0, 1.0, 1.0, 3).is_err());
        assert!(plan(0.0, 1.0, 1.0, 1.0, 2).is_err());
        assert!(plan(0.01, -1.0, 1.0, 1.0, 2).is_err());
        assert!(plan(0.01, 1.0, 0.0, 1.0, 2).is_err());
        assert!(plan(0.01, 1.0, 1.0, -1.0, 2).is_err());
    }

    #[test]
    fn balanced_terms_at_examples() {
        for p in [1, 2] {
            let d = plan(0.01, 1.0, 1.0, 1.0, p).unwrap().diagnostics;
            assert!((d.max_ratio - 1.0).abs() < 1e-9, "{d:?}");
        }
    }
}
