//! Proximal resolvents on Hadamard model spaces, the anchored Halpern
//! resolvent iteration and a Riemannian gradient baseline.

mod objective;
mod resolvent;

use std::io::Write;

use serde::Serialize;

pub use objective::{CustomObjective, Objective, WEIGHT_TOL};
pub use resolvent::{
    resolvent_closed_form, resolvent_numeric, Inner, ResolventSpec, DEFAULT_INNER_MAX_ITER, DEFAULT_INNER_TOL,
};

use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::geometry::{ModelSpace, Point};
use crate::iteration::{
    halpern_run, AnchorConvention, IterationConfig, Schedule, Trace, TraceMeta, TraceRow,
};
use resolvent::{descend, require_hadamard};

/// Final residual below which a run counts as converged in summaries.
pub const CONVERGED_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-12;
const ORACLE_MAX_ITER: usize = 100_000;

/// Result of an optimizer run. For HalpernGD the trace residual is
/// `d(x_k, J_λ x_k)`; for RSGD it is the gradient norm at `x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptRun {
    pub trace: Trace<Point>,
    pub final_point: Point,
    pub objective_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptSummary {
    pub final_point: Point,
    pub steps: usize,
    pub converged: bool,
}

impl OptRun {
    pub fn summary(&self) -> OptSummary {
        OptSummary {
            final_point: self.final_point.clone(),
            steps: self.trace.rows.len() - 1,
            converged: self.trace.last().residual <= CONVERGED_TOL,
        }
    }

    /// CSV with header `k,residual,objective,dist_to_oracle`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,residual,objective,dist_to_oracle")?;
        for (r, f) in self.trace.rows.iter().zip(&self.objective_values) {
            writeln!(
                out,
                "{},{},{},{}",
                r.n,
                fmt_f64(r.residual),
                fmt_f64(*f),
                r.dist_to_fix.map(fmt_f64).unwrap_or_default()
            )?;
        }
        Ok(())
    }
}

/// Options shared by the optimizer drivers.
#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    pub x0: Point,
    pub horizon: usize,
    /// Reference minimizer for the `dist_to_oracle` column.
    pub oracle: Option<Point>,
    pub seed: Option<u64>,
}

impl OptConfig {
    pub fn new(x0: Point, horizon: usize) -> Self {
        Self {
            x0,
            horizon,
            oracle: None,
            seed: None,
        }
    }

    pub fn with_oracle(mut self, p: Point) -> Self {
        self.oracle = Some(p);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// `x_{k+1} = α_{k+1} u ⊕ (1 − α_{k+1}) J_λ(x_k)`. Pass `None` for `u` to
/// anchor at `x₀`.
pub fn hyperbolic_halpern_gd(
    space: &ModelSpace,
    spec: &ResolventSpec,
    u: Option<Point>,
    schedule: Schedule,
    cfg: &OptConfig,
) -> Result<OptRun> {
    require_hadamard(space)?;
    schedule.check_range(cfg.horizon, true)?;
    let u = u.unwrap_or_else(|| cfg.x0.clone());
    let mut icfg = IterationConfig::new(cfg.x0.clone(), cfg.horizon, schedule)
        .with_anchor(u)
        .with_convention(AnchorConvention::AnchorWeightLambda)
        .storing_iterates();
    icfg.fixed_point = cfg.oracle.clone();
    icfg.seed = cfg.seed;
    let mut trace = halpern_run(space, spec, &icfg)?;
    trace.meta.method = "halpern_gd".into();
    finish(space, &spec.objective, trace)
}

/// Default HalpernGD setup: harmonic `α_k`, `λ = 1`, `u = x₀`.
pub fn hyperbolic_halpern_gd_default(
    space: &ModelSpace,
    objective: Objective,
    cfg: &OptConfig,
) -> Result<OptRun> {
    let spec = ResolventSpec::numeric(objective, 1.0)?;
    hyperbolic_halpern_gd(space, &spec, None, Schedule::Harmonic, cfg)
}

fn finish(space: &ModelSpace, objective: &Objective, mut trace: Trace<Point>) -> Result<OptRun> {
    let mut objective_values = Vec::with_capacity(trace.rows.len());
    for row in &mut trace.rows {
        let x = row.iterate.take().expect("optimizer runs store iterates");
        objective_values.push(objective.value(space, &x)?);
        row.iterate = Some(x);
    }
    let final_point = trace
        .last()
        .iterate
        .clone()
        .expect("optimizer runs store iterates");
    Ok(OptRun {
        trace,
        final_point,
        objective_values,
    })
}

/// Step sizes for [`rsgd_run`].
#[derive(Debug, Clone, PartialEq)]
pub enum StepSize {
    Constant(f64),
    /// `η_k` read from a schedule, `k ≥ 1`.
    Schedule(Schedule),
}

impl StepSize {
    fn at(&self, k: usize) -> f64 {
        match self {
            StepSize::Constant(v) => *v,
            StepSize::Schedule(s) => s.value(k),
        }
    }
}

/// Deterministic Riemannian gradient descent `x_{k+1} = exp_{x_k}(−η_{k+1} ∇f(x_k))`.
pub fn rsgd_run(
    space: &ModelSpace,
    objective: &Objective,
    step: &StepSize,
    cfg: &OptConfig,
) -> Result<OptRun> {
    for k in 1..=cfg.horizon.max(1) {
        let eta = step.at(k);
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(eta));
        }
    }
    let dist_fix = |x: &Point| cfg.oracle.as_ref().map(|p| space.dist(x, p)).transpose();
    let mut rows = Vec::with_capacity(cfg.horizon + 1);
    let mut x = cfg.x0.clone();
    let mut g = objective.gradient(space, &x)?;
    rows.push(TraceRow {
        n: 0,
        residual: space.tangent_norm(&g),
        step_dist: 0.0,
        dist_to_fix: dist_fix(&x)?,
        lambda: None,
        iterate: Some(x.clone()),
    });
    for k in 1..=cfg.horizon {
        let eta = step.at(k);
        let next = space.exp_map(&g.scaled(-eta))?;
        g = objective.gradient(space, &next)?;
        rows.push(TraceRow {
            n: k,
            residual: space.tangent_norm(&g),
            step_dist: space.dist(&next, &x)?,
            dist_to_fix: dist_fix(&next)?,
            lambda: Some(eta),
            iterate: Some(next.clone()),
        });
        x = next;
    }
    let meta = TraceMeta {
        method: "rsgd".into(),
        operator: objective.name().into(),
        schedule: match step {
            StepSize::Constant(v) => Some(Schedule::constant(*v)),
            StepSize::Schedule(s) => Some(s.clone()),
        },
        convention: None,
        seed: cfg.seed,
        horizon: cfg.horizon,
    };
    finish(space, objective, Trace { rows, meta })
}

/// Minimizer of a Fréchet objective by gradient descent with backtracking,
/// run until the gradient norm is at most `tol`.
pub fn frechet_oracle(space: &ModelSpace, objective: &Objective, tol: f64) -> Result<Point> {
    require_hadamard(space)?;
    let start = match objective {
        Objective::Frechet { .. } | Objective::HalfSqDist { .. } => objective
            .start_hint()
            .cloned()
            .expect("anchored objectives have a start point"),
        Objective::Custom(_) => {
            return Err(Error::InvalidObjective(
                "the oracle needs a frechet objective".into(),
            ))
        }
    };
    descend(
        space,
        start,
        1.0,
        tol,
        ORACLE_MAX_ITER,
        |y| objective.value(space, y),
        |y| objective.gradient(space, y),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{point_in_ball, seeded};

    fn h2() -> ModelSpace {
        ModelSpace::hyperbolic(2).unwrap()
    }

    #[test]
    fn halpern_gd_at_minimizer_is_constant() {
        let s = h2();
        let a = s.from_spatial(&[0.2, 0.4]).unwrap();
        let spec = ResolventSpec::closed_form(a.clone(), 1.0).unwrap();
        let cfg = OptConfig::new(a.clone(), 20);
        let run = hyperbolic_halpern_gd(&s, &spec, None, Schedule::Harmonic, &cfg).unwrap();
        assert!(run.trace.rows.iter().all(|r| r.residual == 0.0));
        assert_eq!(run.final_point, a);
        assert_eq!(run.objective_values.len(), 21);
    }

    #[test]
    fn halpern_gd_anchored_at_target_moves_monotonically() {
        let s = h2();
        let a = s.from_spatial(&[-0.6, 0.9]).unwrap();
        let x0 = s.from_spatial(&[1.2, 0.1]).unwrap();
        let spec = ResolventSpec::closed_form(a.clone(), 1.0).unwrap();
        let cfg = OptConfig::new(x0, 40).with_oracle(a.clone());
        let run = hyperbolic_halpern_gd(&s, &spec, Some(a), Schedule::Harmonic, &cfg).unwrap();
        let d: Vec<f64> = run.trace.rows.iter().map(|r| r.dist_to_fix.unwrap()).collect();
        assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(run.objective_values.iter().all(|v| v.is_finite()));
        assert!(run.final_point.validate().pass);
    }

    #[test]
    fn rsgd_full_step_reaches_anchor() {
        let s = h2();
        let a = s.from_spatial(&[0.5, -1.0]).unwrap();
        let x0 = s.from_spatial(&[-0.3, 0.2]).unwrap();
        let obj = Objective::half_sq_dist(a.clone());
        let run = rsgd_run(&s, &obj, &StepSize::Constant(1.0), &OptConfig::new(x0, 3)).unwrap();
        let x1 = run.trace.rows[1].iterate.as_ref().unwrap();
        assert!(s.dist(x1, &a).unwrap() < 1e-12);
        assert!(rsgd_run(&s, &obj, &StepSize::Constant(0.0), &OptConfig::new(a.clone(), 3)).is_err());
        let g = obj.gradient(&s, &a).unwrap();
        assert_eq!(s.tangent_norm(&g), 0.0);
    }

    #[test]
    fn rsgd_quarter_point() {
        let s = h2();
        let a1 = s.from_spatial(&[0.8, 0.0]).unwrap();
        let a2 = s.from_spatial(&[-0.2, 1.3]).unwrap();
        let obj = Objective::frechet_equal(vec![a1.clone(), a2.clone()]).unwrap();
        let run = rsgd_run(&s, &obj, &StepSize::Constant(0.5), &OptConfig::new(a1.clone(), 1)).unwrap();
        let quarter = s.combine(&a1, &a2, 0.25).unwrap();
        assert!(s.dist(&run.final_point, &quarter).unwrap() <= 1e-8);
    }

    #[test]
    fn oracle_single_and_pair() {
        let s = h2();
        let a1 = s.from_spatial(&[0.8, 0.0]).unwrap();
        let a2 = s.from_spatial(&[-0.2, 1.3]).unwrap();
        let one = Objective::frechet(vec![a1.clone()], vec![1.0]).unwrap();
        assert_eq!(frechet_oracle(&s, &one, ORACLE_TOL).unwrap(), a1);
        let two = Objective::frechet_equal(vec![a1.clone(), a2.clone()]).unwrap();
        let m = frechet_oracle(&s, &two, ORACLE_TOL).unwrap();
        let mid = s.combine(&a1, &a2, 0.5).unwrap();
        assert!(s.dist(&m, &mid).unwrap() < 1e-10);
    }

    #[test]
    fn oracle_euclidean_centroid() {
        let s = ModelSpace::euclidean(2).unwrap();
        let pts = [[0.0, 0.0], [3.0, 1.0], [-1.0, 4.0]];
        let anchors = pts.iter().map(|p| s.point(p.to_vec()).unwrap()).collect();
        let obj = Objective::frechet_equal(anchors).unwrap();
        let m = frechet_oracle(&s, &obj, ORACLE_TOL).unwrap();
        let centroid = s.point(vec![2.0 / 3.0, 5.0 / 3.0]).unwrap();
        assert!(s.dist(&m, &centroid).unwrap() < 1e-10);
    }

    #[test]
    fn resolvent_fixes_oracle_minimizer() {
        let s = ModelSpace::hyperbolic(3).unwrap();
        let mut rng = seeded(5);
        let o = s.base_point();
        let anchors = (0..5)
            .map(|_| point_in_ball(&s, &o, 1.5, &mut rng).unwrap())
            .collect();
        let obj = Objective::frechet_equal(anchors).unwrap();
        let xstar = frechet_oracle(&s, &obj, ORACLE_TOL).unwrap();
        let spec = ResolventSpec::numeric(obj, 1.0).unwrap();
        assert!(s.dist(&spec.apply(&s, &xstar).unwrap(), &xstar).unwrap() < 1e-8);
    }

    #[test]
    fn csv_layout() {
        let s = h2();
        let a = s.from_spatial(&[0.2, 0.4]).unwrap();
        let spec = ResolventSpec::closed_form(a.clone(), 1.0).unwrap();
        let cfg = OptConfig::new(s.base_point(), 4).with_oracle(a);
        let run = hyperbolic_halpern_gd(&s, &spec, None, Schedule::Harmonic, &cfg).unwrap();
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("k,residual,objective,dist_to_oracle\n0,"));
        let sum = run.summary();
        assert_eq!(sum.steps, 4);
    }
}
