//! Bundled property suites with fixed seeds. Each check keeps the worst
//! `bound − observed` margin over its samples and passes when that margin is
//! at least `−tol`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{cat_comparison_excess, Geometry, ModelSpace, Point, Side};
use crate::iteration::{km_run, viscosity_run, AnchorConvention, IterationConfig, Schedule};
use crate::operators::{check_nonexpansive, Gradient, Operator, OperatorSpec};
use crate::optimizer::{
    frechet_oracle, hyperbolic_halpern_gd_default, resolvent_closed_form, Objective, OptConfig, OptRun,
    ResolventSpec, ORACLE_TOL,
};
use crate::rates::{
    c_recursion_report, c_table, km_bound_report, p_n_sequence, pn_bound_report, right_shift_report,
    rotation_report, visc_bound_report, visc_boundedness_report, visc_constants, BoundReport, BOUND_TOL,
    RIGHT_SHIFT_HORIZON, RIGHT_SHIFT_TOL, ROTATION_MAX_N, ROTATION_TOL,
};
use crate::sampling::{point_in_ball, seeded, unit_tangent, BallPairs, SeededRng};

pub const SUITE_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub tol: f64,
    pub worst_margin: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} samples={} worst_margin={:.3e} tol={:.0e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.samples,
            self.worst_margin,
            self.tol
        )?;
        if let Some(n) = &self.note {
            write!(f, " ({n})")?;
        }
        Ok(())
    }
}

/// Accumulates samples of one check.
#[derive(Debug, Clone)]
pub struct Check {
    name: String,
    tol: f64,
    samples: usize,
    worst: f64,
    note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, tol: f64) -> Self {
        Self {
            name: name.into(),
            tol,
            samples: 0,
            worst: f64::INFINITY,
            note: None,
        }
    }

    /// One sample of `observed ≤ bound`.
    pub fn record(&mut self, observed: f64, bound: f64) {
        let m = bound - observed;
        self.samples += 1;
        if !(m >= self.worst) {
            self.worst = if m.is_nan() { f64::NEG_INFINITY } else { m };
        }
    }

    /// One sample of `|error| ≤ tol`.
    pub fn record_error(&mut self, error: f64) {
        self.record(error.abs(), 0.0);
    }

    pub fn absorb(&mut self, report: &BoundReport) {
        self.samples += report.rows.len();
        let w = if report.violated && !(report.worst_margin < -report.tol) {
            f64::NEG_INFINITY
        } else {
            report.worst_margin
        };
        if !(w >= self.worst) {
            self.worst = w;
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    pub fn finish(self) -> CheckResult {
        CheckResult {
            pass: self.samples > 0 && self.worst >= -self.tol,
            name: self.name,
            samples: self.samples,
            tol: self.tol,
            worst_margin: self.worst,
            note: self.note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub convention_selected: Option<AnchorConvention>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        Self {
            suite: suite.into(),
            checks: checks.into_iter().map(Check::finish).collect(),
            convention_selected: None,
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}]", self.suite)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        if let Some(conv) = self.convention_selected {
            writeln!(f, "  convention_selected={conv:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Operators,
    KmRates,
    CRecursion,
    Sharpness,
    Viscosity,
    Optimizer,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Geometry,
        Suite::Operators,
        Suite::KmRates,
        Suite::CRecursion,
        Suite::Sharpness,
        Suite::Viscosity,
        Suite::Optimizer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Operators => "operators",
            Suite::KmRates => "km_rates",
            Suite::CRecursion => "c_recursion",
            Suite::Sharpness => "sharpness",
            Suite::Viscosity => "viscosity",
            Suite::Optimizer => "optimizer",
            Suite::All => "all",
        }
    }

    /// Run with the default sizes and [`SUITE_SEED`].
    pub fn run(self) -> Result<Vec<SuiteReport>> {
        let seed = SUITE_SEED;
        Ok(match self {
            Suite::Geometry => vec![geometry_suite(1000, seed)?],
            Suite::Operators => vec![operators_suite(1000, seed)?],
            Suite::KmRates => vec![km_rates_suite(8, 1000, seed)?],
            Suite::CRecursion => vec![c_recursion_suite(50, 2, seed)?],
            Suite::Sharpness => vec![sharpness_report()?],
            Suite::Viscosity => vec![viscosity_suite(10_000, 2, seed)?],
            Suite::Optimizer => vec![optimizer_suite(100, 1000, 10_000, seed)?],
            Suite::All => {
                let mut out = Vec::new();
                for s in Suite::EACH {
                    out.extend(s.run()?);
                }
                out
            }
        })
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

fn hyperbolic(kappa: f64, dim: usize) -> ModelSpace {
    ModelSpace::new(kappa, dim).expect("valid model space")
}

/// Sampling radius used for a space in the geometry suite.
fn radius_for(space: &ModelSpace) -> f64 {
    match space.geometry() {
        Geometry::Euclidean => 3.0,
        // radius 2 on the unit hyperboloid keeps coordinates moderate
        Geometry::Hyperbolic => 2.0 / space.curvature().abs().sqrt(),
        Geometry::Spherical => 1.0,
    }
}

fn sample(space: &ModelSpace, rng: &mut SeededRng) -> Result<Point> {
    point_in_ball(space, &space.base_point(), radius_for(space), rng)
}

/// Geodesic parameterization, CC, CAT(0) convexity and comparison, and the
/// metric axioms, `samples` draws each.
pub fn geometry_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = seeded(seed);
    let all = [
        hyperbolic(-1.0, 2),
        hyperbolic(-1.0, 3),
        hyperbolic(-0.5, 2),
        hyperbolic(-4.0, 3),
        ModelSpace::euclidean(3)?,
        ModelSpace::sphere(2)?,
    ];
    let nonpositive = &all[..5];
    let hyperbolic_only = &all[..4];

    let mut param = Check::new("geodesic_parameterization", 1e-8);
    let mut cc = Check::new("cc_inequality", 1e-9);
    let mut cat0 = Check::new("cat0_two_geodesic_convexity", 1e-9);
    let mut comparison = Check::new("cat0_comparison", 1e-9);
    let mut metric = Check::new("metric_axioms", 1e-10);

    for i in 0..samples {
        let s = &all[i % all.len()];
        let (x, y) = (sample(s, &mut rng)?, sample(s, &mut rng)?);
        let (t1, t2): (f64, f64) = (rng.gen(), rng.gen());
        let d = s.dist(&x, &y)?;
        let g1 = s.combine(&x, &y, t1)?;
        let g2 = s.combine(&x, &y, t2)?;
        param.record_error(s.dist(&g1, &g2)? - (t1 - t2).abs() * d);

        let z = sample(s, &mut rng)?;
        metric.record_error(s.dist(&x, &y)? - s.dist(&y, &x)?);
        metric.record(s.dist(&x, &z)?, s.dist(&x, &y)? + s.dist(&y, &z)?);

        let s = &nonpositive[i % nonpositive.len()];
        let (x, y, z) = (sample(s, &mut rng)?, sample(s, &mut rng)?, sample(s, &mut rng)?);
        let t: f64 = rng.gen();
        cc.record(
            s.dist(&z, &s.combine(&x, &y, t)?)?,
            (1.0 - t) * s.dist(&z, &x)? + t * s.dist(&z, &y)?,
        );

        let s = &hyperbolic_only[i % hyperbolic_only.len()];
        let p: Vec<Point> = (0..4).map(|_| sample(s, &mut rng)).collect::<Result<_>>()?;
        let t: f64 = rng.gen();
        cat0.record(
            s.dist(&s.combine(&p[0], &p[1], t)?, &s.combine(&p[2], &p[3], t)?)?,
            (1.0 - t) * s.dist(&p[0], &p[2])? + t * s.dist(&p[1], &p[3])?,
        );
        let sides = (Side::ALL[rng.gen_range(0..3)], Side::ALL[rng.gen_range(0..3)]);
        let excess = cat_comparison_excess(
            s,
            [&p[0], &p[1], &p[2]],
            (sides.0, rng.gen()),
            (sides.1, rng.gen()),
        )?;
        comparison.record(excess, 0.0);
    }
    Ok(SuiteReport::new(
        "geometry",
        vec![param, cc, cat0, comparison, metric],
    ))
}

fn nonexpansive_check<O: Operator<ModelSpace>>(
    check: &mut Check,
    op: &O,
    space: ModelSpace,
    radius: f64,
    pairs: usize,
    seed: u64,
) -> Result<()> {
    let center = space.base_point();
    let r = check_nonexpansive(
        op,
        &space,
        BallPairs::new(space, center, radius, seed).take(pairs),
        check.tol,
    )?;
    check.samples += r.trials;
    let worst = -r
        .max_excess
        .max(r.max_contraction_excess.unwrap_or(f64::NEG_INFINITY));
    if !(worst >= check.worst) {
        check.worst = worst;
    }
    Ok(())
}

/// Sampled nonexpansiveness of the operator zoo, elliptic rotation
/// invariants, and forward-step fixed points.
pub fn operators_suite(pairs: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = seeded(seed);
    let h2 = ModelSpace::hyperbolic(2)?;
    let h3 = ModelSpace::hyperbolic(3)?;
    let e2 = ModelSpace::euclidean(2)?;
    let e3 = ModelSpace::euclidean(3)?;

    let mut nonexp = Check::new("nonexpansive", 1e-9);
    let cases: Vec<(OperatorSpec, ModelSpace, f64)> = vec![
        (OperatorSpec::Identity, h2, 2.0),
        (OperatorSpec::PlanarRotation { angle: 0.7 }, e2, 2.0),
        (OperatorSpec::EllipticRotation { angle: 1.3 }, h3, 2.0),
        (
            OperatorSpec::geodesic_contraction(point_in_ball(&h2, &h2.base_point(), 1.0, &mut rng)?, 0.6)?,
            h2,
            2.0,
        ),
        (
            OperatorSpec::geodesic_contraction(point_in_ball(&e3, &e3.base_point(), 1.0, &mut rng)?, 0.3)?,
            e3,
            2.0,
        ),
        (
            OperatorSpec::forward(
                Gradient::Quadratic {
                    diag: vec![1.0, 2.0, 4.0],
                    center: vec![0.5, -0.25, 1.0],
                },
                0.45,
                4.0,
            )?,
            e3,
            3.0,
        ),
        (OperatorSpec::forward(Gradient::HalfSqNorm, 1.5, 1.0)?, e2, 3.0),
        (OperatorSpec::ConstantAnchor { u: h2.base_point() }, h2, 2.0),
    ];
    for (i, (op, space, radius)) in cases.iter().enumerate() {
        nonexpansive_check(
            &mut nonexp,
            op,
            *space,
            *radius,
            pairs,
            seed.wrapping_add(i as u64),
        )?;
    }

    let mut elliptic = Check::new("elliptic_rotation_invariants", 1e-12);
    let rot = OperatorSpec::EllipticRotation { angle: 2.1 };
    let p = h3.base_point();
    elliptic.record_error(h3.dist(&rot.apply(&h3, &p)?, &p)?);
    for _ in 0..pairs {
        let x = point_in_ball(&h3, &p, 3.0, &mut rng)?;
        let tx = rot.apply(&h3, &x)?;
        let diag = tx.validate();
        let scale = tx.coords().iter().map(|c| c * c).sum::<f64>().max(1.0);
        elliptic.record(
            diag.residual / scale,
            if diag.orientation_ok { 0.0 } else { -1.0 },
        );
    }

    let mut forward = Check::new("forward_fixed_points", 1e-10);
    let center = vec![0.5, -0.25, 1.0];
    let quad = OperatorSpec::forward(
        Gradient::Quadratic {
            diag: vec![1.0, 2.0, 4.0],
            center: center.clone(),
        },
        0.45,
        4.0,
    )?;
    let xstar = e3.point(center)?;
    forward.record_error(e3.dist(&quad.apply(&e3, &xstar)?, &xstar)?);
    let half = OperatorSpec::forward(Gradient::HalfSqNorm, 1.5, 1.0)?;
    let zero = e2.base_point();
    forward.record_error(e2.dist(&half.apply(&e2, &zero)?, &zero)?);

    Ok(SuiteReport::new("operators", vec![nonexp, elliptic, forward]))
}

/// A nonexpansive map on a bounded convex region containing every iterate.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub space: ModelSpace,
    pub op: OperatorSpec,
    pub x0: Point,
    pub fixed: Point,
    /// Diameter of the metric ball that contains the iteration.
    pub diam: f64,
}

/// Rotations about and contractions within metric balls, `per_family`
/// instances each for Euclidean and hyperboloid models. Euclidean balls have
/// radius `euclid_radius`; hyperboloid balls have diameter 1.
pub fn bounded_instances(per_family: usize, euclid_radius: f64, seed: u64) -> Result<Vec<Instance>> {
    let mut rng = seeded(seed);
    let mut out = Vec::with_capacity(4 * per_family);
    for i in 0..per_family {
        let dim = 2 + i % 2;
        for (space, radius) in [
            (ModelSpace::euclidean(dim)?, euclid_radius),
            (ModelSpace::hyperbolic(dim)?, 0.5),
        ] {
            let center = space.base_point();
            let x0 = point_in_ball(&space, &center, radius, &mut rng)?;
            let angle = rng.gen_range(0.1..2.0 * PI - 0.1);
            let rot = match space.geometry() {
                Geometry::Euclidean => OperatorSpec::PlanarRotation { angle },
                _ => OperatorSpec::EllipticRotation { angle },
            };
            let kind = if space.geometry() == Geometry::Euclidean {
                "euclidean"
            } else {
                "hyperbolic"
            };
            out.push(Instance {
                label: format!("{kind}_rotation"),
                space,
                op: rot,
                x0: x0.clone(),
                fixed: center.clone(),
                diam: 2.0 * radius,
            });
            let c = point_in_ball(&space, &center, radius, &mut rng)?;
            let beta = rng.gen_range(0.1..0.95);
            out.push(Instance {
                label: format!("{kind}_contraction"),
                space,
                op: OperatorSpec::geodesic_contraction(c.clone(), beta)?,
                x0,
                fixed: c,
                diam: 2.0 * radius,
            });
        }
    }
    Ok(out)
}

pub fn km_schedules() -> Vec<Schedule> {
    vec![
        Schedule::constant(0.1),
        Schedule::constant(0.5),
        Schedule::constant(0.9),
        Schedule::Harmonic,
    ]
}

/// `residual_n ≤ diam/√(π Σ λᵢ(1−λᵢ))` over [`bounded_instances`] with a unit
/// Euclidean disk, for every schedule in [`km_schedules`].
pub fn km_rates_suite(per_family: usize, horizon: usize, seed: u64) -> Result<SuiteReport> {
    let instances = bounded_instances(per_family, 1.0, seed)?;
    let mut checks: Vec<Check> = Vec::new();
    let mut runs = 0;
    for inst in &instances {
        let name = format!("km_bound/{}", inst.label);
        let idx = match checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                checks.push(Check::new(name, BOUND_TOL));
                checks.len() - 1
            }
        };
        for s in km_schedules() {
            let cfg = IterationConfig::new(inst.x0.clone(), horizon, s.clone());
            let trace = km_run(&inst.space, &inst.op, &cfg)?;
            checks[idx].absorb(&km_bound_report(&trace, &s, inst.diam, BOUND_TOL)?);
            runs += 1;
        }
    }
    let mut rep = SuiteReport::new("km_rates", checks);
    for c in &mut rep.checks {
        c.note = Some(format!("{runs} runs in total, horizon {horizon}"));
    }
    Ok(rep)
}

/// Recursion oracle on diameter-one instances: `d(x_n, x_m) ≤ c_{m,n}`,
/// `residual_n ≤ P_n`, and the probabilistic products for constant
/// schedules `0.1, …, 0.9`.
pub fn c_recursion_suite(size: usize, per_family: usize, seed: u64) -> Result<SuiteReport> {
    let instances = bounded_instances(per_family, 0.5, seed)?;
    let mut cmn = Check::new("c_mn_domination", BOUND_TOL);
    let mut pn = Check::new("p_n_domination", BOUND_TOL);
    let mut prob = Check::new("probabilistic_inequality", 1e-10);
    for i in 1..=9 {
        let s = Schedule::constant(i as f64 / 10.0);
        let table = c_table(&s, size)?;
        let seq = p_n_sequence(&s, &table);
        prob.absorb(&seq.probabilistic_report(1e-10));
        for inst in &instances {
            let cfg = IterationConfig::new(inst.x0.clone(), size, s.clone()).storing_iterates();
            let trace = km_run(&inst.space, &inst.op, &cfg)?;
            cmn.absorb(&c_recursion_report(
                &inst.space,
                &trace,
                &table,
                inst.diam,
                BOUND_TOL,
            )?);
            pn.absorb(&pn_bound_report(&trace, &seq, inst.diam, BOUND_TOL));
        }
    }
    Ok(SuiteReport::new("c_recursion", vec![cmn, pn, prob]))
}

/// Right-shift lower bound and rotation equality.
pub fn sharpness_report() -> Result<SuiteReport> {
    let (shift, rot) = rayon::join(
        || right_shift_report(RIGHT_SHIFT_HORIZON, RIGHT_SHIFT_TOL),
        || rotation_report(ROTATION_MAX_N, ROTATION_TOL),
    );
    let (shift, rot) = (shift?, rot?);
    let mut lower = Check::new("right_shift_lower_bound", RIGHT_SHIFT_TOL);
    lower.absorb(&shift);
    let mut equality = Check::new("rotation_equality", ROTATION_TOL);
    for case in &rot.cases {
        let err = match rot.convention_selected {
            Some(conv) => {
                let slot = AnchorConvention::BOTH
                    .iter()
                    .position(|c| *c == conv)
                    .unwrap_or(0);
                (case.residuals[slot] - case.expected).abs()
            }
            None => f64::INFINITY,
        };
        equality.record_error(err);
    }
    let failures = rot.failures();
    if !rot.consistent || !failures.is_empty() {
        equality.record(1.0, 0.0);
        equality.note(format!(
            "{} cases without a unique consistent match",
            failures.len()
        ));
    } else {
        let coincident = rot
            .cases
            .iter()
            .filter(|c| c.outcome == crate::rates::RotationOutcome::Coincident)
            .count();
        equality.note(format!("{coincident} cases where both conventions coincide"));
    }
    let mut rep = SuiteReport::new("sharpness", vec![lower, equality]);
    rep.convention_selected = rot.convention_selected;
    Ok(rep)
}

/// Viscosity rates on hyperboloid instances: elliptic rotations fixing the
/// base point, contractions toward sampled centers, `β ∈ {¼, ½, ¾}`.
pub fn viscosity_suite(horizon: usize, per_beta: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = seeded(seed);
    let mut steps = Check::new("viscosity_step_rate", BOUND_TOL);
    let mut residuals = Check::new("viscosity_residual_rate", BOUND_TOL);
    let mut bounded = Check::new("viscosity_boundedness", BOUND_TOL);
    for beta in [0.25, 0.5, 0.75] {
        for i in 0..per_beta {
            let space = ModelSpace::hyperbolic(2 + i % 2)?;
            let p = space.base_point();
            let center = point_in_ball(&space, &p, 1.5, &mut rng)?;
            let x0 = point_in_ball(&space, &p, 1.5, &mut rng)?;
            let t = OperatorSpec::EllipticRotation {
                angle: rng.gen_range(0.1..2.0 * PI - 0.1),
            };
            let f = OperatorSpec::geodesic_contraction(center, beta)?;
            let cfg = IterationConfig::new(x0.clone(), horizon, Schedule::Viscosity { beta })
                .with_fixed_point(p.clone());
            let trace = viscosity_run(&space, &t, &f, &cfg)?;
            let consts = visc_constants(&space, &x0, &p, &f, beta)?;
            let rep = visc_bound_report(&trace, &consts, BOUND_TOL)?;
            steps.absorb(&rep.steps);
            residuals.absorb(&rep.residuals);
            bounded.absorb(&visc_boundedness_report(&trace, &consts, BOUND_TOL)?);
        }
    }
    residuals.note("row k compares the residual of x_{k-1} with the bound at k");
    Ok(SuiteReport::new("viscosity", vec![steps, residuals, bounded]))
}

/// Five anchors with equal weights in a hyperboloid ball of radius 1.5,
/// started at the base point.
#[derive(Debug, Clone)]
pub struct FrechetBenchmark {
    pub space: ModelSpace,
    pub objective: Objective,
    pub x0: Point,
    pub oracle: Point,
}

pub fn frechet_benchmark(seed: u64) -> Result<FrechetBenchmark> {
    let space = ModelSpace::hyperbolic(2)?;
    let mut rng = seeded(seed);
    let p = space.base_point();
    let anchors = (0..5)
        .map(|_| point_in_ball(&space, &p, 1.5, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let objective = Objective::frechet_equal(anchors)?;
    let oracle = frechet_oracle(&space, &objective, ORACLE_TOL)?;
    Ok(FrechetBenchmark {
        space,
        objective,
        x0: p,
        oracle,
    })
}

impl FrechetBenchmark {
    /// HalpernGD with harmonic `α_k`, `λ = 1` and `u = x₀`.
    pub fn run_halpern_gd(&self, horizon: usize) -> Result<OptRun> {
        let cfg = OptConfig::new(self.x0.clone(), horizon).with_oracle(self.oracle.clone());
        hyperbolic_halpern_gd_default(&self.space, self.objective.clone(), &cfg)
    }
}

/// `max_{k ∈ (K/2, K]} k·r_k / max_{k ≤ K/2} k·r_k` for residuals `r_k`.
pub fn k_residual_growth(run: &OptRun) -> (f64, f64) {
    let rows = &run.trace.rows;
    let half = rows.len() / 2;
    let kr = |r: &crate::iteration::TraceRow<Point>| r.n as f64 * r.residual;
    let first = rows[..half].iter().map(kr).fold(0.0, f64::max);
    let second = rows[half..].iter().map(kr).fold(0.0, f64::max);
    (first.max(second), second / first)
}

/// Allowed ratio between the late and early maxima of `k·d(x_k, J_λ x_k)`.
pub const GROWTH_RATIO_LIMIT: f64 = 1.1;

/// Resolvent agreement, nonexpansiveness, fixed points, gradients and the
/// HalpernGD residual decay.
pub fn optimizer_suite(
    pairs: usize,
    lipschitz_pairs: usize,
    horizon: usize,
    seed: u64,
) -> Result<SuiteReport> {
    let mut rng = seeded(seed);
    let space = ModelSpace::hyperbolic(2)?;
    let o = space.base_point();

    let mut agree = Check::new("resolvent_closed_vs_numeric", 1e-8);
    for _ in 0..pairs {
        let x = point_in_ball(&space, &o, 2.0, &mut rng)?;
        let a = point_in_ball(&space, &o, 2.0, &mut rng)?;
        for lambda in [0.1, 1.0, 10.0] {
            let cf = resolvent_closed_form(&space, &x, &a, lambda)?;
            let num =
                ResolventSpec::numeric(Objective::half_sq_dist(a.clone()), lambda)?.apply(&space, &x)?;
            agree.record_error(space.dist(&cf, &num)?);
        }
    }

    let bench = frechet_benchmark(seed)?;
    let mut lipschitz = Check::new("resolvent_nonexpansive", 1e-8);
    for (i, lambda) in [0.1, 1.0, 10.0].into_iter().enumerate() {
        let a = point_in_ball(&space, &o, 1.0, &mut rng)?;
        let closed = ResolventSpec::closed_form(a, lambda)?;
        let numeric = ResolventSpec::numeric(bench.objective.clone(), lambda)?;
        let n = lipschitz_pairs.div_ceil(3);
        nonexpansive_check(&mut lipschitz, &closed, space, 2.0, n, seed + 10 + i as u64)?;
        nonexpansive_check(&mut lipschitz, &numeric, space, 2.0, n, seed + 20 + i as u64)?;
    }

    let mut fixed = Check::new("resolvent_fixed_points", 1e-8);
    let mut moves = Check::new("resolvent_moves_nonminimizers", 0.0);
    for lambda in [0.1, 1.0, 10.0] {
        let spec = ResolventSpec::numeric(bench.objective.clone(), lambda)?;
        fixed.record_error(space.dist(&spec.apply(&space, &bench.oracle)?, &bench.oracle)?);
        let mut tried = 0;
        while tried < 20 {
            let x = point_in_ball(&space, &o, 2.5, &mut rng)?;
            if space.tangent_norm(&bench.objective.gradient(&space, &x)?) < 0.1 {
                continue;
            }
            tried += 1;
            moves.record(1e-4, space.dist(&spec.apply(&space, &x)?, &x)?);
        }
    }

    let mut grad = Check::new("gradient_finite_difference", 1e-6);
    let h = 1e-5;
    for _ in 0..100 {
        let y = point_in_ball(&space, &o, 2.0, &mut rng)?;
        let v = unit_tangent(&space, &y, &mut rng)?;
        let f = |t: f64| -> Result<f64> { bench.objective.value(&space, &space.exp_map(&v.scaled(t))?) };
        let fd = (f(h)? - f(-h)?) / (2.0 * h);
        let g = space.tangent_inner(&bench.objective.gradient(&space, &y)?, &v);
        grad.record_error((fd - g) / g.abs().max(1.0));
    }

    let mut decay = Check::new("halpern_gd_k_residual_bounded", 0.0);
    let run = bench.run_halpern_gd(horizon)?;
    let (max_kr, ratio) = k_residual_growth(&run);
    decay.record(ratio, GROWTH_RATIO_LIMIT);
    decay.note(format!(
        "max k*residual {max_kr:.4e}, late/early ratio {ratio:.4}, final distance to oracle {:.3e}",
        run.trace.last().dist_to_fix.unwrap_or(f64::NAN)
    ));

    Ok(SuiteReport::new(
        "optimizer",
        vec![agree, lipschitz, fixed, moves, grad, decay],
    ))
}
