//! Log-log fits of gap curves.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Inclusive `(k_min, k_max)` actually used.
    pub window: (usize, usize),
    /// Set when the window was shrunk because gaps stopped being positive.
    pub shrunk: bool,
}

/// Minimum number of points for a fit.
pub const MIN_POINTS: usize = 5;

/// Least-squares fit of `log(gap_k)` against `log(k)` over
/// `k in [k_min, k_max]`, where `gaps[k]` is the gap at iteration `k`.
///
/// If a nonpositive gap occurs inside the window, the window is cut just
/// before it and `shrunk` is set.
pub fn estimate_rate(gaps: &[f64], k_min: usize, k_max: usize) -> Result<RateFit> {
    let k_min = k_min.max(1);
    let k_max = k_max.min(gaps.len().saturating_sub(1));
    if k_min > k_max {
        return Err(Error::RateFit(format!(
            "empty window [{k_min}, {k_max}] for a series of length {}",
            gaps.len()
        )));
    }
    let mut end = k_max;
    let mut shrunk = false;
    if let Some(bad) = (k_min..=k_max).find(|&k| !(gaps[k] > 0.0 && gaps[k].is_finite())) {
        shrunk = true;
        if bad == k_min {
            return Err(Error::RateFit(format!("gap at k = {k_min} is not positive")));
        }
        end = bad - 1;
    }
    let count = end - k_min + 1;
    if count < MIN_POINTS {
        return Err(Error::RateFit(format!(
            "only {count} usable points in [{k_min}, {end}]; need {MIN_POINTS}"
        )));
    }
    let xs: Vec<f64> = (k_min..=end).map(|k| (k as f64).ln()).collect();
    let ys: Vec<f64> = (k_min..=end).map(|k| gaps[k].ln()).collect();
    let nf = count as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        window: (k_min, end),
        shrunk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| if k == 0 { f64::NAN } else { f(k as f64) }).collect()
    }

    #[test]
    fn exact_power_laws() {
        let fit = estimate_rate(&series(|k| 7.0 / (k * k), 100), 1, 100).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-6);
        assert!(fit.r_squared > 0.999999);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-9);
        let fit = estimate_rate(&series(|k| 3.0 / k, 100), 1, 100).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-6);
    }

    #[test]
    fn window_shrinks_at_convergence() {
        let mut g = series(|k| 1.0 / k, 50);
        for v in g.iter_mut().skip(31) {
            *v = 0.0;
        }
        let fit = estimate_rate(&g, 2, 50).unwrap();
        assert!(fit.shrunk);
        assert_eq!(fit.window, (2, 30));
    }

    #[test]
    fn too_few_points() {
        let g = series(|k| 1.0 / k, 10);
        assert!(estimate_rate(&g, 1, 4).is_err());
        assert!(estimate_rate(&g, 8, 3).is_err());
    }
}
