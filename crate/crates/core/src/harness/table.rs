//! Convergence tables and their CSV form.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::config::{ErrorEstimator, NormKind, Scheme};
use super::metrics::{convergence_rate_between, RateModel};
use crate::error::Result;
use crate::mesh::MeshKind;

pub const CSV_COLUMNS: [&str; 5] = ["eps", "N", "error", "rate_plain", "rate_log_adjusted"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub n: usize,
    pub error: Option<f64>,
    pub rate_plain: Option<f64>,
    pub rate_log_adjusted: Option<f64>,
    /// Why `error` is absent.
    pub failure: Option<String>,
}

/// Errors and rates keyed by `(eps, N)`, grouped by `eps` in sweep order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub problem: String,
    pub scheme: Scheme,
    pub mesh: MeshKind,
    pub norm: NormKind,
    pub estimator: ErrorEstimator,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Build a table from per-`(eps, N)` outcomes, filling in rates between
    /// consecutive `N` of the same `eps`. The last `N` of each `eps` gets none.
    pub fn from_outcomes(
        problem: String,
        scheme: Scheme,
        mesh: MeshKind,
        norm: NormKind,
        estimator: ErrorEstimator,
        outcomes: Vec<(f64, usize, Result<f64>)>,
    ) -> Self {
        let mut rows: Vec<ConvergenceRow> = outcomes
            .into_iter()
            .map(|(eps, n, outcome)| {
                let (error, failure) = match outcome {
                    Ok(e) => (Some(e), None),
                    Err(err) => (None, Some(err.to_string())),
                };
                ConvergenceRow { eps, n, error, rate_plain: None, rate_log_adjusted: None, failure }
            })
            .collect();
        for k in 0..rows.len().saturating_sub(1) {
            let (a, b) = (&rows[k], &rows[k + 1]);
            if a.eps != b.eps {
                continue;
            }
            if let (Some(e1), Some(e2)) = (a.error, b.error) {
                let (n1, n2) = (a.n, b.n);
                rows[k].rate_plain = convergence_rate_between(e1, e2, n1, n2, RateModel::Plain);
                rows[k].rate_log_adjusted = convergence_rate_between(e1, e2, n1, n2, RateModel::LogAdjusted);
            }
        }
        ConvergenceTable { problem, scheme, mesh, norm, estimator, rows }
    }

    pub fn row(&self, eps: f64, n: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.eps == eps && r.n == n)
    }

    pub fn rows_for(&self, eps: f64) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().filter(move |r| r.eps == eps)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().filter(|r| r.failure.is_some())
    }

    /// `max_eps e(eps, N) / min_eps e(eps, N)`; absent if any error at `n` is missing.
    pub fn eps_spread(&self, n: usize) -> Option<f64> {
        let errors: Option<Vec<f64>> = self.rows.iter().filter(|r| r.n == n).map(|r| r.error).collect();
        let errors = errors.filter(|e| !e.is_empty())?;
        let max = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
        Some(max / min)
    }

    pub fn to_csv(&self) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.eps,
                r.n,
                cell(r.error),
                cell(r.rate_plain),
                cell(r.rate_log_adjusted)
            );
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

/// Two tables over the same sweep, joined on `(eps, N)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub tables: [ConvergenceTable; 2],
}

impl Comparison {
    /// `eps,N` followed by the error and rate columns of each scheme,
    /// prefixed with the scheme name.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,N");
        for t in &self.tables {
            for column in &CSV_COLUMNS[2..] {
                let _ = write!(out, ",{}_{column}", t.scheme);
            }
        }
        out.push('\n');
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for (a, b) in self.tables[0].rows.iter().zip(&self.tables[1].rows) {
            let _ = write!(out, "{},{}", a.eps, a.n);
            for r in [a, b] {
                let _ = write!(out, ",{},{},{}", cell(r.error), cell(r.rate_plain), cell(r.rate_log_adjusted));
            }
            out.push('\n');
        }
        out
    }
}
