//! Weights `π^n_k`, the two-index table `c_{m,n}` and the residual bounds
//! `P_n` dominating Krasnosel'skii–Mann iterates in CAT(0) spaces.
//!
//! Everything here assumes a normalized domain, `diam(K) = 1`; the trace
//! checkers divide observed distances by the supplied diameter.

use std::f64::consts::PI;

use super::report::{BoundReport, BoundRow};
use crate::error::{Error, Result};
use crate::geometry::Space;
use crate::iteration::{Schedule, Trace};

/// Default cap on the size of [`c_table`].
pub const DEFAULT_C_LIMIT: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct PiWeights {
    pub n: usize,
    /// `π^n_k` for `k = 0..=n`.
    pub values: Vec<f64>,
}

/// Coefficient with the convention `λ₀ = 1`.
fn lambda(s: &Schedule, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        s.value(k)
    }
}

/// `π^n_k = λ_k ∏_{j=k+1}^n (1 − λ_j)` with `λ₀ = 1`.
pub fn pi_weights(s: &Schedule, n: usize) -> PiWeights {
    let mut values = vec![0.0; n + 1];
    let mut tail = 1.0;
    for k in (0..=n).rev() {
        values[k] = lambda(s, k) * tail;
        tail *= 1.0 - lambda(s, k);
    }
    PiWeights { n, values }
}

/// Table of `c_{m,n}` for `−1 ≤ m < n ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CTable {
    pub size: usize,
    // rows[m + 1][n]
    rows: Vec<Vec<f64>>,
}

impl CTable {
    /// `c_{m,n}`; `m = −1` is the boundary row of ones.
    pub fn get(&self, m: isize, n: usize) -> f64 {
        assert!(m >= -1 && (m < n as isize || m == -1) && n <= self.size);
        self.rows[(m + 1) as usize][n]
    }

    /// Iterate over `(m, n, c_{m,n})` for `0 ≤ m < n ≤ N`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (1..=self.size).flat_map(move |n| (0..n).map(move |m| (m, n, self.rows[m + 1][n])))
    }
}

pub fn c_table(s: &Schedule, size: usize) -> Result<CTable> {
    c_table_with_limit(s, size, DEFAULT_C_LIMIT)
}

/// Fill `c_{m,n} = Σ_{j≤m} Σ_{k=m+1}^n π^m_j π^n_k c_{j−1,k−1}` in increasing
/// `n`. For a fixed `n` the inner sums over `k` are shared suffix sums, which
/// brings the cost down to `O(N³)`.
pub fn c_table_with_limit(s: &Schedule, size: usize, limit: usize) -> Result<CTable> {
    if size > limit {
        return Err(Error::SizeLimit {
            requested: size,
            limit,
        });
    }
    s.validate()?;
    let pis: Vec<Vec<f64>> = (0..=size).map(|m| pi_weights(s, m).values).collect();
    let mut rows = vec![vec![0.0; size + 1]; size + 1];
    rows[0].iter_mut().for_each(|c| *c = 1.0);

    // suffix[j][k] = Σ_{k'=k}^{n} π^n_{k'} c_{j−1,k'−1}
    let mut suffix = vec![vec![0.0; size + 2]; size + 1];
    for n in 1..=size {
        let pin = &pis[n];
        for (j, suf) in suffix.iter_mut().enumerate().take(n) {
            suf[n + 1] = 0.0;
            for k in (j + 1..=n).rev() {
                suf[k] = suf[k + 1] + pin[k] * rows[j][k - 1];
            }
        }
        for m in 0..n {
            let c: f64 = (0..=m).map(|j| pis[m][j] * suffix[j][m + 1]).sum();
            rows[m + 1][n] = c;
        }
    }
    Ok(CTable { size, rows })
}

/// Residual bounds `P_n = c_{n,n+1}/λ_{n+1}` with the normalized products
/// `√(Σ_{i=1}^n λᵢ(1−λᵢ)) · P_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PnSequence {
    pub p: Vec<f64>,
    pub products: Vec<f64>,
}

impl PnSequence {
    pub fn max_product(&self) -> f64 {
        self.products.iter().copied().fold(0.0, f64::max)
    }

    /// Rows of `product_n` against `1/√π`.
    pub fn probabilistic_report(&self, tol: f64) -> BoundReport {
        let cap = 1.0 / PI.sqrt();
        let rows = self
            .products
            .iter()
            .enumerate()
            .map(|(n, &v)| BoundRow::new(n, v, cap))
            .collect();
        BoundReport::from_rows(rows, tol)
    }
}

/// `P_n` for `n = 0..N−1`, computed from a table of size `N`.
pub fn p_n_sequence(s: &Schedule, table: &CTable) -> PnSequence {
    let size = table.size;
    let mut p = Vec::with_capacity(size);
    let mut products = Vec::with_capacity(size);
    let mut sum = 0.0;
    for n in 0..size {
        if n >= 1 {
            let l = s.value(n);
            sum += l * (1.0 - l);
        }
        let pn = table.get(n as isize, n + 1) / s.value(n + 1);
        p.push(pn);
        products.push(sum.sqrt() * pn);
    }
    PnSequence { p, products }
}

/// Convenience wrapper building the table first.
pub fn p_n_report(s: &Schedule, size: usize) -> Result<PnSequence> {
    Ok(p_n_sequence(s, &c_table(s, size)?))
}

/// For every `n ≤ N`, the tightest of `d(x_n, x_m)/diam ≤ c_{m,n}` over
/// `m < n`. The trace must hold its iterates.
pub fn c_recursion_report<S: Space>(
    space: &S,
    trace: &Trace<S::Point>,
    table: &CTable,
    diam: f64,
    tol: f64,
) -> Result<BoundReport> {
    let xs = trace
        .iterates()
        .ok_or_else(|| Error::Config("recursion check needs stored iterates".into()))?;
    let top = table.size.min(xs.len() - 1);
    let mut rows = Vec::with_capacity(top);
    for n in 1..=top {
        let mut worst: Option<BoundRow> = None;
        for m in 0..n {
            let d = space.dist(xs[n], xs[m])? / diam;
            let row = BoundRow::new(n, d, table.get(m as isize, n));
            if worst.is_none_or(|w| row.margin < w.margin) {
                worst = Some(row);
            }
        }
        rows.extend(worst);
    }
    Ok(BoundReport::from_rows(rows, tol))
}

/// `d(x_n, T x_n)/diam ≤ P_n` for the rows covered by `pn`.
pub fn pn_bound_report<P>(trace: &Trace<P>, pn: &PnSequence, diam: f64, tol: f64) -> BoundReport {
    let rows = trace
        .rows
        .iter()
        .zip(&pn.p)
        .map(|(r, &p)| BoundRow::new(r.n, r.residual / diam, p))
        .collect();
    BoundReport::from_rows(rows, tol)
}
