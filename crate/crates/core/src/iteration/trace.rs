use std::io::Write;

use serde::Serialize;

use super::{AnchorConvention, Schedule};
use crate::export::fmt_f64;

/// One iterate's worth of bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow<P> {
    pub n: usize,
    /// `d(x_n, T x_n)`.
    pub residual: f64,
    /// `d(x_n, x_{n−1})`, zero for the first row.
    pub step_dist: f64,
    pub dist_to_fix: Option<f64>,
    /// Coefficient used to produce `x_n`; `None` for `x_0` and Picard rows.
    pub lambda: Option<f64>,
    pub iterate: Option<P>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMeta {
    pub method: String,
    pub operator: String,
    pub schedule: Option<Schedule>,
    pub convention: Option<AnchorConvention>,
    pub seed: Option<u64>,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<P> {
    pub rows: Vec<TraceRow<P>>,
    pub meta: TraceMeta,
}

impl<P> Trace<P> {
    pub fn residuals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.residual).collect()
    }

    pub fn step_dists(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.step_dist).collect()
    }

    /// Stored iterates, if the run kept them.
    pub fn iterates(&self) -> Option<Vec<&P>> {
        self.rows.iter().map(|r| r.iterate.as_ref()).collect()
    }

    pub fn last(&self) -> &TraceRow<P> {
        self.rows.last().expect("a trace always holds x_0")
    }

    /// CSV with header `n,residual,step_dist,dist_to_fix,lambda`; absent
    /// values are written as empty fields.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,residual,step_dist,dist_to_fix,lambda")?;
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.n,
                fmt_f64(r.residual),
                fmt_f64(r.step_dist),
                opt(r.dist_to_fix),
                opt(r.lambda)
            )?;
        }
        Ok(())
    }
}
