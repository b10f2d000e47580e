use serde::Serialize;

use super::report::{BoundReport, BoundRow};
use crate::error::{Error, Result};
use crate::geometry::Space;
use crate::iteration::{Schedule, Trace};
use crate::operators::Operator;

/// Constants entering the `O(1/k)` viscosity rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViscosityConstants {
    pub beta: f64,
    pub gamma: f64,
    pub j: u64,
    /// `max{d(x₀, x̄), d(f(x̄), x̄)/(1−β)}`.
    pub c_xbar: f64,
}

impl ViscosityConstants {
    /// `2J·C/(γk)`, bounding `d(x_k, x_{k−1})`.
    pub fn step_bound(&self, k: usize) -> f64 {
        2.0 * self.j as f64 * self.c_xbar / (self.gamma * k as f64)
    }

    /// `2C(J+2)/(γk)`, bounding `d(T x_{k−1}, x_{k−1})`.
    pub fn residual_bound(&self, k: usize) -> f64 {
        2.0 * self.c_xbar * (self.j as f64 + 2.0) / (self.gamma * k as f64)
    }
}

/// `xbar` must be a fixed point of the operator paired with `f`; this is not
/// checked.
pub fn visc_constants<S, F>(
    space: &S,
    x0: &S::Point,
    xbar: &S::Point,
    f: &F,
    beta: f64,
) -> Result<ViscosityConstants>
where
    S: Space,
    F: Operator<S> + ?Sized,
{
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidContraction(beta));
    }
    let gamma = 1.0 - beta;
    let j = (2.0 / gamma).ceil() as u64;
    let z = f.apply(space, xbar)?;
    let c_xbar = space.dist(x0, xbar)?.max(space.dist(&z, xbar)? / gamma);
    Ok(ViscosityConstants {
        beta,
        gamma,
        j,
        c_xbar,
    })
}

fn check_schedule<P>(trace: &Trace<P>, consts: &ViscosityConstants) -> Result<()> {
    let expected = Schedule::Viscosity { beta: consts.beta };
    if trace.meta.method != "viscosity" || trace.meta.schedule.as_ref() != Some(&expected) {
        return Err(Error::InvalidSchedule(format!(
            "viscosity bounds need a viscosity trace with schedule {expected:?}"
        )));
    }
    Ok(())
}

/// Both viscosity rate checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViscosityReport {
    /// `d(x_k, x_{k−1})` against `2J·C/(γk)`.
    pub steps: BoundReport,
    /// Row `k` compares the residual of `x_{k−1}` with `2C(J+2)/(γk)`.
    pub residuals: BoundReport,
}

impl ViscosityReport {
    pub fn violated(&self) -> bool {
        self.steps.violated || self.residuals.violated
    }

    pub fn worst_margin(&self) -> f64 {
        self.steps.worst_margin.min(self.residuals.worst_margin)
    }
}

pub fn visc_bound_report<P>(
    trace: &Trace<P>,
    consts: &ViscosityConstants,
    tol: f64,
) -> Result<ViscosityReport> {
    check_schedule(trace, consts)?;
    let mut steps = Vec::with_capacity(trace.rows.len());
    let mut residuals = Vec::with_capacity(trace.rows.len());
    for pair in trace.rows.windows(2) {
        let (prev, row) = (&pair[0], &pair[1]);
        let k = row.n;
        steps.push(BoundRow::new(k, row.step_dist, consts.step_bound(k)));
        residuals.push(BoundRow::new(k, prev.residual, consts.residual_bound(k)));
    }
    Ok(ViscosityReport {
        steps: BoundReport::from_rows(steps, tol),
        residuals: BoundReport::from_rows(residuals, tol),
    })
}

/// `d(x_k, x̄) ≤ C_x̄` for every row; the trace must carry `dist_to_fix`.
pub fn visc_boundedness_report<P>(
    trace: &Trace<P>,
    consts: &ViscosityConstants,
    tol: f64,
) -> Result<BoundReport> {
    let rows = trace
        .rows
        .iter()
        .map(|r| {
            r.dist_to_fix
                .map(|d| BoundRow::new(r.n, d, consts.c_xbar))
                .ok_or_else(|| Error::Config("trace has no distance to the fixed point".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport::from_rows(rows, tol))
}
