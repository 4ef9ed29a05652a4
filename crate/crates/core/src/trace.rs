//! Per-iteration run records.

use serde::Serialize;

use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Gm,
    Fgm,
    SgdSmallStep,
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub k: usize,
    /// `x_k`: the last iterate for GM/SGD, the output sequence for FGM.
    pub x: Point,
    /// `u_k` (FGM only).
    pub u: Option<Point>,
    /// `y_k`: the prox center for FGM; for GM and SGD the running average
    /// of `x_1..x_k` that the method reports as its output.
    pub y: Option<Point>,
    pub f_value: f64,
    /// Objective at the averaged point (GM and SGD).
    pub f_avg: Option<f64>,
    /// FGM: `A_k`. GM: the averaging weight total `sum q^{k-i}`.
    /// SGD: `k`.
    pub a_k: f64,
    /// FGM: `alpha_k`. GM and SGD: the step size.
    pub alpha_k: f64,
    pub oracle_calls: u64,
    /// Realized upper-model error of the linearization used to produce
    /// this iterate, when noise was observed.
    pub realized_delta2: Option<f64>,
    /// Deterministic guarantee for this iterate's output point, if `R` and
    /// the method's constants determine one.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub method: Method,
    pub records: Vec<Record>,
    pub output_point: Point,
    pub output_gap: Option<f64>,
    /// Set when a run stopped early (A_k overflow guard).
    pub truncated: Option<String>,
}

impl Trace {
    pub fn last(&self) -> &Record {
        self.records.last().expect("trace has at least the initial record")
    }

    pub fn oracle_calls(&self) -> u64 {
        self.last().oracle_calls
    }

    /// Gap of each record's reported output point against `f_star`: the
    /// averaged point for GM and SGD, `x_k` for FGM.
    pub fn output_gaps(&self, f_star: f64) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| r.f_avg.unwrap_or(r.f_value) - f_star)
            .collect()
    }

    /// Gap of the last iterate `x_k` of each record.
    pub fn iterate_gaps(&self, f_star: f64) -> Vec<f64> {
        self.records.iter().map(|r| r.f_value - f_star).collect()
    }

    /// Checks the structural invariants: `k` strictly increasing from 0,
    /// nondecreasing call counts, and strictly increasing `A_k` for FGM.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, r) in self.records.iter().enumerate() {
            if r.k != i {
                return Err(format!("record {i} has k = {}", r.k));
            }
        }
        for w in self.records.windows(2) {
            if w[1].oracle_calls < w[0].oracle_calls {
                return Err(format!("oracle calls decreased at k = {}", w[1].k));
            }
            if self.method == Method::Fgm && w[1].a_k <= w[0].a_k {
                return Err(format!("A_k not increasing at k = {}", w[1].k));
            }
        }
        Ok(())
    }
}
