//! Picard, Krasnosel'skii–Mann, Halpern and viscosity drivers.
//!
//! Every driver records `d(x_n, T x_n)` for each iterate `x_0 … x_N`, so a
//! trace always holds `horizon + 1` rows.

mod schedule;
mod trace;

pub use schedule::{schedule_diagnostics, Schedule, ScheduleDiagnostics};
pub use trace::{Trace, TraceMeta, TraceRow};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Space;
use crate::operators::Operator;

/// Which weight of the Halpern step multiplies the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorConvention {
    /// `z_k = λ_k u ⊕ (1−λ_k) T z_{k−1}`.
    #[default]
    AnchorWeightLambda,
    /// `z_k = (1−λ_k) u ⊕ λ_k T z_{k−1}`.
    AnchorWeightOneMinusLambda,
}

impl AnchorConvention {
    pub const BOTH: [AnchorConvention; 2] = [
        AnchorConvention::AnchorWeightLambda,
        AnchorConvention::AnchorWeightOneMinusLambda,
    ];

    /// Weight carried by the anchor for coefficient `lambda`.
    pub fn anchor_weight(self, lambda: f64) -> f64 {
        match self {
            AnchorConvention::AnchorWeightLambda => lambda,
            AnchorConvention::AnchorWeightOneMinusLambda => 1.0 - lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationConfig<P> {
    pub x0: P,
    pub anchor: Option<P>,
    pub horizon: usize,
    pub schedule: Schedule,
    pub convention: AnchorConvention,
    /// Known fixed point; fills `dist_to_fix` when present.
    pub fixed_point: Option<P>,
    pub store_iterates: bool,
    pub seed: Option<u64>,
}

impl<P> IterationConfig<P> {
    pub fn new(x0: P, horizon: usize, schedule: Schedule) -> Self {
        Self {
            x0,
            anchor: None,
            horizon,
            schedule,
            convention: AnchorConvention::default(),
            fixed_point: None,
            store_iterates: false,
            seed: None,
        }
    }

    pub fn with_anchor(mut self, u: P) -> Self {
        self.anchor = Some(u);
        self
    }

    pub fn with_convention(mut self, c: AnchorConvention) -> Self {
        self.convention = c;
        self
    }

    pub fn with_fixed_point(mut self, p: P) -> Self {
        self.fixed_point = Some(p);
        self
    }

    pub fn storing_iterates(mut self) -> Self {
        self.store_iterates = true;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Shared loop: `step(x_{n−1}, T x_{n−1}, λ_n)` produces `x_n`.
fn drive<S, O, F>(
    space: &S,
    op: &O,
    cfg: &IterationConfig<S::Point>,
    meta: TraceMeta,
    use_schedule: bool,
    mut step: F,
) -> Result<Trace<S::Point>>
where
    S: Space,
    O: Operator<S> + ?Sized,
    F: FnMut(&S::Point, &S::Point, f64) -> Result<S::Point>,
{
    let dist_fix = |x: &S::Point| -> Result<Option<f64>> {
        cfg.fixed_point.as_ref().map(|p| space.dist(x, p)).transpose()
    };
    let keep = |x: &S::Point| cfg.store_iterates.then(|| x.clone());

    let mut rows = Vec::with_capacity(cfg.horizon + 1);
    let mut x = cfg.x0.clone();
    let mut tx = op.apply(space, &x)?;
    rows.push(TraceRow {
        n: 0,
        residual: space.dist(&x, &tx)?,
        step_dist: 0.0,
        dist_to_fix: dist_fix(&x)?,
        lambda: None,
        iterate: keep(&x),
    });
    for n in 1..=cfg.horizon {
        let lambda = if use_schedule {
            cfg.schedule.value(n)
        } else {
            f64::NAN
        };
        let next = step(&x, &tx, lambda)?;
        let tnext = op.apply(space, &next)?;
        rows.push(TraceRow {
            n,
            residual: space.dist(&next, &tnext)?,
            step_dist: space.dist(&next, &x)?,
            dist_to_fix: dist_fix(&next)?,
            lambda: use_schedule.then_some(lambda),
            iterate: keep(&next),
        });
        x = next;
        tx = tnext;
    }
    Ok(Trace { rows, meta })
}

fn meta<P>(method: &str, operator: &str, cfg: &IterationConfig<P>, schedule: bool) -> TraceMeta {
    TraceMeta {
        method: method.into(),
        operator: operator.into(),
        schedule: schedule.then(|| cfg.schedule.clone()),
        convention: None,
        seed: cfg.seed,
        horizon: cfg.horizon,
    }
}

/// `x_{n+1} = (1−λ_{n+1}) x_n ⊕ λ_{n+1} T x_n`.
pub fn km_run<S, O>(space: &S, op: &O, cfg: &IterationConfig<S::Point>) -> Result<Trace<S::Point>>
where
    S: Space,
    O: Operator<S> + ?Sized,
{
    cfg.schedule.check_range(cfg.horizon, true)?;
    let m = meta("km", &op.label(), cfg, true);
    drive(space, op, cfg, m, true, |x, tx, l| space.combine(x, tx, l))
}

/// Halpern iteration with a fixed anchor; the weight placement follows
/// `cfg.convention`.
pub fn halpern_run<S, O>(space: &S, op: &O, cfg: &IterationConfig<S::Point>) -> Result<Trace<S::Point>>
where
    S: Space,
    O: Operator<S> + ?Sized,
{
    let u = cfg
        .anchor
        .as_ref()
        .ok_or_else(|| Error::Config("halpern iteration requires an anchor u".into()))?;
    cfg.schedule.check_range(cfg.horizon, false)?;
    let mut m = meta("halpern", &op.label(), cfg, true);
    m.convention = Some(cfg.convention);
    let conv = cfg.convention;
    drive(space, op, cfg, m, true, |_, tx, l| {
        space.combine(u, tx, 1.0 - conv.anchor_weight(l))
    })
}

/// `x_{k+1} = α_{k+1} f(x_k) ⊕ (1−α_{k+1}) T x_k` for a β-contraction `f`.
pub fn viscosity_run<S, O, F>(
    space: &S,
    op: &O,
    f: &F,
    cfg: &IterationConfig<S::Point>,
) -> Result<Trace<S::Point>>
where
    S: Space,
    O: Operator<S> + ?Sized,
    F: Operator<S> + ?Sized,
{
    match f.lipschitz() {
        Some(beta) if (0.0..1.0).contains(&beta) => {}
        Some(beta) => return Err(Error::InvalidContraction(beta)),
        None => return Err(Error::InvalidContraction(f64::NAN)),
    }
    cfg.schedule.check_range(cfg.horizon, false)?;
    let m = meta("viscosity", &op.label(), cfg, true);
    drive(space, op, cfg, m, true, |x, tx, a| {
        let fx = f.apply(space, x)?;
        space.combine(&fx, tx, 1.0 - a)
    })
}

/// `x_{n+1} = T x_n`.
pub fn picard_run<S, O>(space: &S, op: &O, x0: S::Point, horizon: usize) -> Result<Trace<S::Point>>
where
    S: Space,
    O: Operator<S> + ?Sized,
{
    let cfg = IterationConfig::new(x0, horizon, Schedule::constant(1.0));
    picard_run_with(space, op, &cfg)
}

/// Picard iteration honouring the bookkeeping options of `cfg`; the schedule
/// is ignored.
pub fn picard_run_with<S, O>(space: &S, op: &O, cfg: &IterationConfig<S::Point>) -> Result<Trace<S::Point>>
where
    S: Space,
    O: Operator<S> + ?Sized,
{
    let m = meta("picard", &op.label(), cfg, false);
    drive(space, op, cfg, m, false, |_, tx, _| Ok(tx.clone()))
}
