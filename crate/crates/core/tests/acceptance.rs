//! Acceptance criteria, one line per criterion. Bounds are recomputed here
//! from their closed forms rather than read back from `geofix::rates`.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use geofix::iteration::{km_run, viscosity_run};
use geofix::optimizer::{frechet_oracle, resolvent_closed_form, rsgd_run, OptConfig, StepSize};
use geofix::optimizer::{Objective, ResolventSpec, ORACLE_TOL};
use geofix::rates::{c_table, rotation_report, RotationOutcome};
use geofix::sampling::{point_in_ball, seeded, BallPairs};
use geofix::verify::{
    bounded_instances, frechet_benchmark, geometry_suite, k_residual_growth, GROWTH_RATIO_LIMIT,
};
use geofix::{
    AnchorConvention, IterationConfig, ModelSpace, Operator, OperatorSpec, Schedule, SeqSpace, SeqVector,
};
use rand::Rng;
use rayon::prelude::*;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

type Criterion = fn() -> geofix::Result<Outcome>;

/// Running minimum of `bound − observed`.
#[derive(Clone, Copy)]
struct Margin {
    worst: f64,
    samples: usize,
}

impl Margin {
    fn new() -> Self {
        Self {
            worst: f64::INFINITY,
            samples: 0,
        }
    }

    fn record(&mut self, observed: f64, bound: f64) {
        let m = bound - observed;
        self.samples += 1;
        if !(m >= self.worst) {
            self.worst = if m.is_nan() { f64::NEG_INFINITY } else { m };
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            worst: self.worst.min(other.worst),
            samples: self.samples + other.samples,
        }
    }

    fn ok(&self, tol: f64) -> bool {
        self.samples > 0 && self.worst >= -tol
    }
}

fn constant_lambdas() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// `λ_k` for the KM schedules, `k ≥ 1`.
fn km_lambda(s: &Schedule, k: usize) -> f64 {
    match s {
        Schedule::Constant { value } => *value,
        Schedule::Harmonic => 1.0 / (k as f64 + 1.0),
        other => panic!("unexpected schedule {other:?}"),
    }
}

fn km_bound() -> geofix::Result<Outcome> {
    let instances = bounded_instances(25, 1.0, SEED)?;
    let schedules = [
        Schedule::constant(0.1),
        Schedule::constant(0.5),
        Schedule::constant(0.9),
        Schedule::Harmonic,
    ];
    let horizon = 1000;
    let margin = instances
        .par_iter()
        .map(|inst| -> geofix::Result<Margin> {
            let mut m = Margin::new();
            for s in &schedules {
                let trace = km_run(
                    &inst.space,
                    &inst.op,
                    &IterationConfig::new(inst.x0.clone(), horizon, s.clone()),
                )?;
                let mut sum = 0.0;
                for row in &trace.rows[1..] {
                    let l = km_lambda(s, row.n);
                    sum += l * (1.0 - l);
                    m.record(row.residual, inst.diam / (PI * sum).sqrt());
                }
            }
            Ok(m)
        })
        .try_reduce(Margin::new, |a, b| Ok(a.merge(b)))?;
    Ok(Outcome::new(
        margin.ok(1e-9),
        format!(
            "{} instances x {} schedules, horizon {horizon}, {} rows, worst margin {:.3e}",
            instances.len(),
            schedules.len(),
            margin.samples,
            margin.worst
        ),
    ))
}

/// `c_{m,n}` straight from the double-sum definition, indexed `[m+1][n]`.
fn naive_c(lambda: impl Fn(usize) -> f64, size: usize) -> Vec<Vec<f64>> {
    let lam = |k: usize| if k == 0 { 1.0 } else { lambda(k) };
    let pis: Vec<Vec<f64>> = (0..=size)
        .map(|n| {
            (0..=n)
                .map(|k| lam(k) * ((k + 1)..=n).map(|j| 1.0 - lam(j)).product::<f64>())
                .collect()
        })
        .collect();
    let pi = |n: usize, k: usize| pis[n][k];
    let mut c = vec![vec![0.0; size + 1]; size + 1];
    c[0].iter_mut().for_each(|v| *v = 1.0);
    for m in 0..size {
        for n in (m + 1)..=size {
            let mut acc = 0.0;
            for j in 0..=m {
                for k in (m + 1)..=n {
                    acc += pi(m, j) * pi(n, k) * c[j][k - 1];
                }
            }
            c[m + 1][n] = acc;
        }
    }
    c
}

fn recursion_oracle() -> geofix::Result<Outcome> {
    let size = 50;
    let instances = bounded_instances(5, 0.5, SEED + 1)?;
    let results = constant_lambdas()
        .into_par_iter()
        .map(|l| -> geofix::Result<(Margin, Margin, Margin, f64)> {
            let c = naive_c(|_| l, size + 1);
            let lib = c_table(&Schedule::constant(l), size + 1)?;
            let mut table_err: f64 = 0.0;
            for m in 0..=size {
                for n in (m + 1)..=size + 1 {
                    table_err = table_err.max((lib.get(m as isize, n) - c[m + 1][n]).abs());
                }
            }
            let p = |n: usize| c[n + 1][n + 1] / l;
            let (mut dom, mut res, mut prob) = (Margin::new(), Margin::new(), Margin::new());
            for n in 0..=size {
                prob.record((n as f64 * l * (1.0 - l)).sqrt() * p(n), 1.0 / PI.sqrt());
            }
            for inst in &instances {
                let cfg =
                    IterationConfig::new(inst.x0.clone(), size, Schedule::constant(l)).storing_iterates();
                let trace = km_run(&inst.space, &inst.op, &cfg)?;
                let xs = trace.iterates().expect("stored");
                for n in 0..=size {
                    res.record(trace.rows[n].residual / inst.diam, p(n));
                    for m in 0..n {
                        dom.record(inst.space.dist(xs[n], xs[m])? / inst.diam, c[m + 1][n]);
                    }
                }
            }
            Ok((dom, res, prob, table_err))
        })
        .collect::<geofix::Result<Vec<_>>>()?;
    let (mut dom, mut res, mut prob, mut err) = (Margin::new(), Margin::new(), Margin::new(), 0.0f64);
    for (d, r, p, e) in results {
        dom = dom.merge(d);
        res = res.merge(r);
        prob = prob.merge(p);
        err = err.max(e);
    }
    let pass = dom.ok(1e-9) && res.ok(1e-9) && prob.ok(1e-10) && err <= 1e-12;
    Ok(Outcome::new(
        pass,
        format!(
            "N={size}, {} instances x 9 schedules; c_mn margin {:.3e}, P_n margin {:.3e}, \
             product margin {:.3e}, library table vs direct sum {:.1e}",
            instances.len(),
            dom.worst,
            res.worst,
            prob.worst,
            err
        ),
    ))
}

fn right_shift() -> geofix::Result<Outcome> {
    let horizon = 500;
    let space = SeqSpace::for_horizon(horizon);
    let cfg = IterationConfig::new(SeqVector::basis(space.len, 0), horizon, Schedule::constant(0.5));
    let trace = km_run(&space, &OperatorSpec::RightShift, &cfg)?;
    let mut m = Margin::new();
    for row in &trace.rows {
        m.record(1.0 / ((row.n + 1) as f64).sqrt(), row.residual);
    }
    Ok(Outcome::new(
        m.ok(1e-12) && trace.rows.len() == horizon + 1,
        format!(
            "n = 0..={horizon}, worst residual - 1/sqrt(n+1) = {:.3e}",
            m.worst
        ),
    ))
}

fn rotation() -> geofix::Result<Outcome> {
    let max_n = 200;
    let rep = rotation_report(max_n, 1e-9)?;
    let mut bad = Vec::new();
    let mut coincident = Vec::new();
    for case in &rep.cases {
        let expected = 2.0 / (case.n as f64 + 1.0);
        let hits: Vec<bool> = case
            .residuals
            .iter()
            .map(|r| (r - expected).abs() <= 1e-9)
            .collect();
        match case.outcome {
            RotationOutcome::Coincident if hits == [true, true] => coincident.push(case.n),
            RotationOutcome::Unique(conv) if Some(conv) == rep.convention_selected => {
                let slot = AnchorConvention::BOTH
                    .iter()
                    .position(|c| *c == conv)
                    .expect("known");
                if !hits[slot] || hits[1 - slot] {
                    bad.push(case.n);
                }
            }
            _ => bad.push(case.n),
        }
    }
    let pass =
        rep.consistent && rep.convention_selected.is_some() && bad.is_empty() && rep.cases.len() == max_n + 1;
    Ok(Outcome::new(
        pass,
        format!(
            "convention {:?}, unique for {} of {} n, both conventions produce identical iterates at n = {coincident:?}, failing n = {bad:?}",
            rep.convention_selected,
            rep.cases.len() - coincident.len() - bad.len(),
            rep.cases.len(),
        ),
    ))
}

fn viscosity() -> geofix::Result<Outcome> {
    let horizon = 10_000;
    let mut rng = seeded(SEED + 2);
    let mut setups = Vec::new();
    for beta in [0.25, 0.5, 0.75] {
        for i in 0..4 {
            let space = ModelSpace::hyperbolic(2 + i % 2)?;
            let p = space.base_point();
            let center = point_in_ball(&space, &p, 1.5, &mut rng)?;
            let x0 = point_in_ball(&space, &p, 1.5, &mut rng)?;
            let angle = rng.gen_range(0.1..2.0 * PI - 0.1);
            setups.push((space, beta, center, x0, angle));
        }
    }
    let (steps, residuals) = setups
        .par_iter()
        .map(
            |(space, beta, center, x0, angle)| -> geofix::Result<(Margin, Margin)> {
                let p = space.base_point();
                let t = OperatorSpec::EllipticRotation { angle: *angle };
                let f = OperatorSpec::geodesic_contraction(center.clone(), *beta)?;
                let trace = viscosity_run(
                    space,
                    &t,
                    &f,
                    &IterationConfig::new(x0.clone(), horizon, Schedule::Viscosity { beta: *beta }),
                )?;
                let gamma = 1.0 - beta;
                let j = (2.0 / gamma).ceil();
                let c = space
                    .dist(x0, &p)?
                    .max(space.dist(&f.apply(space, &p)?, &p)? / gamma);
                let (mut sm, mut rm) = (Margin::new(), Margin::new());
                for k in 1..=horizon {
                    let kf = k as f64;
                    sm.record(trace.rows[k].step_dist, 2.0 * j * c / (gamma * kf));
                    rm.record(trace.rows[k - 1].residual, 2.0 * c * (j + 2.0) / (gamma * kf));
                }
                Ok((sm, rm))
            },
        )
        .try_reduce(
            || (Margin::new(), Margin::new()),
            |a, b| Ok((a.0.merge(b.0), a.1.merge(b.1))),
        )?;
    Ok(Outcome::new(
        steps.ok(1e-9) && residuals.ok(1e-9),
        format!(
            "{} runs to k = {horizon}; step margin {:.3e}, residual margin {:.3e}",
            setups.len(),
            steps.worst,
            residuals.worst
        ),
    ))
}

fn resolvent() -> geofix::Result<Outcome> {
    let space = ModelSpace::hyperbolic(2)?;
    let o = space.base_point();
    let mut rng = seeded(SEED + 3);
    let mut agree: f64 = 0.0;
    let mut pairs = 0;
    for _ in 0..100 {
        let x = point_in_ball(&space, &o, 2.0, &mut rng)?;
        let a = point_in_ball(&space, &o, 2.0, &mut rng)?;
        for lambda in [0.1, 1.0, 10.0] {
            let cf = resolvent_closed_form(&space, &x, &a, lambda)?;
            let num =
                ResolventSpec::numeric(Objective::half_sq_dist(a.clone()), lambda)?.apply(&space, &x)?;
            agree = agree.max(space.dist(&cf, &num)?);
            pairs += 1;
        }
    }

    let bench = frechet_benchmark(SEED + 3)?;
    let mut lipschitz = Margin::new();
    for (i, lambda) in [0.1, 1.0, 10.0].into_iter().enumerate() {
        let spec = ResolventSpec::numeric(bench.objective.clone(), lambda)?;
        let excess = BallPairs::new(space, o.clone(), 2.0, SEED + 30 + i as u64)
            .take(334)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(x, y)| -> geofix::Result<Margin> {
                let mut m = Margin::new();
                m.record(
                    space.dist(&spec.apply(&space, &x)?, &spec.apply(&space, &y)?)?,
                    space.dist(&x, &y)?,
                );
                Ok(m)
            })
            .try_reduce(Margin::new, |a, b| Ok(a.merge(b)))?;
        lipschitz = lipschitz.merge(excess);
    }

    let mut fixed: f64 = 0.0;
    for lambda in [0.1, 1.0, 10.0] {
        let spec = ResolventSpec::numeric(bench.objective.clone(), lambda)?;
        fixed = fixed.max(space.dist(&spec.apply(&space, &bench.oracle)?, &bench.oracle)?);
    }

    Ok(Outcome::new(
        agree <= 1e-8 && lipschitz.ok(1e-8) && fixed <= 1e-8,
        format!(
            "closed vs numeric max {agree:.2e} over {pairs} (pair, lambda); \
             Lipschitz margin {:.2e} over {} pairs; J moves the oracle by {fixed:.2e}",
            lipschitz.worst, lipschitz.samples
        ),
    ))
}

fn halpern_gd() -> geofix::Result<Outcome> {
    let horizon = 10_000;
    let bench = frechet_benchmark(SEED + 4)?;
    let oracle = frechet_oracle(&bench.space, &bench.objective, ORACLE_TOL)?;
    let run = bench.run_halpern_gd(horizon)?;
    let final_dist = bench.space.dist(&run.final_point, &oracle)?;
    let (max_kr, ratio) = k_residual_growth(&run);
    let rsgd = rsgd_run(
        &bench.space,
        &bench.objective,
        &StepSize::Constant(1.0),
        &OptConfig::new(bench.x0.clone(), horizon).with_oracle(oracle.clone()),
    )?;
    let rsgd_dist = bench.space.dist(&rsgd.final_point, &oracle)?;
    let rsgd_hit = rsgd
        .trace
        .rows
        .iter()
        .find(|r| r.dist_to_fix.is_some_and(|d| d <= 1e-6))
        .map(|r| r.n);
    Ok(Outcome::new(
        final_dist <= 1e-6 && ratio <= GROWTH_RATIO_LIMIT,
        format!(
            "HalpernGD after {horizon} steps: distance to oracle {final_dist:.3e} (target 1e-6), \
             max k*d(x_k, J x_k) {max_kr:.4e}, late/early ratio {ratio:.4} (limit {GROWTH_RATIO_LIMIT}); \
             RSGD step 1: distance {rsgd_dist:.3e}, first within 1e-6 at k = {rsgd_hit:?}"
        ),
    ))
}

fn geometry() -> geofix::Result<Outcome> {
    let rep = geometry_suite(1200, SEED + 5)?;
    let wanted = [
        "geodesic_parameterization",
        "cc_inequality",
        "cat0_two_geodesic_convexity",
        "cat0_comparison",
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for name in wanted {
        match rep.check(name) {
            Some(c) => {
                pass &= c.pass && c.samples >= 1000;
                parts.push(format!(
                    "{name} {} n={} margin {:.2e}",
                    if c.pass { "ok" } else { "bad" },
                    c.samples,
                    c.worst_margin
                ));
            }
            None => {
                pass = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion, u64); 8] = [
        ("km_bound", km_bound, 60),
        ("recursion_oracle", recursion_oracle, 120),
        ("right_shift_sharpness", right_shift, 5),
        ("rotation_sharpness", rotation, 10),
        ("viscosity_rates", viscosity, 60),
        ("resolvent_correctness", resolvent, 30),
        ("halpern_gd_benchmark", halpern_gd, 120),
        ("geometry_suite", geometry, 30),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = outcome.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "criterion {} {name}: {} [{:.2}s of {limit}s{}] {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over time" },
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
