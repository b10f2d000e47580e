use std::f64::consts::PI;

use super::report::{BoundReport, BoundRow};
use crate::error::{Error, Result};
use crate::iteration::{Schedule, Trace};

/// `diam / √(π Σ_{i=1}^n λᵢ(1−λᵢ))`.
pub fn km_bound(s: &Schedule, diam: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::UndefinedBound("the KM bound starts at n = 1".into()));
    }
    let sum: f64 = (1..=n).map(|i| km_weight(s.value(i))).sum();
    km_bound_from_sum(diam, sum)
}

#[inline]
fn km_weight(l: f64) -> f64 {
    l * (1.0 - l)
}

fn km_bound_from_sum(diam: f64, sum: f64) -> Result<f64> {
    if !(sum > 0.0) {
        return Err(Error::UndefinedBound(format!("sum of lambda(1-lambda) is {sum}")));
    }
    Ok(diam / (PI * sum).sqrt())
}

/// Check `d(x_n, T x_n) ≤ km_bound(s, diam, n) + tol` for every row `n ≥ 1`.
pub fn km_bound_report<P>(trace: &Trace<P>, s: &Schedule, diam: f64, tol: f64) -> Result<BoundReport> {
    let mut sum = 0.0;
    let mut rows = Vec::with_capacity(trace.rows.len());
    for row in trace.rows.iter().skip(1) {
        sum += km_weight(s.value(row.n));
        rows.push(BoundRow::new(row.n, row.residual, km_bound_from_sum(diam, sum)?));
    }
    Ok(BoundReport::from_rows(rows, tol))
}

/// Known Halpern residual bounds from the Hilbert/normed-space literature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiteratureBound {
    /// `2/(k+1) · ‖z₀ − P_Fix u‖`, tight on Hilbert spaces.
    Lieder,
    /// `4/(k+1) · ‖z₀ − P_Fix u‖`, valid in normed spaces.
    Sabach,
}

pub fn literature_bound(kind: LiteratureBound, k: usize, dist0: f64) -> f64 {
    let c = match kind {
        LiteratureBound::Lieder => 2.0,
        LiteratureBound::Sabach => 4.0,
    };
    c * dist0 / (k as f64 + 1.0)
}
