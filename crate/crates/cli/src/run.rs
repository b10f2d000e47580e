use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use geofix::iteration::{halpern_run, km_run, picard_run_with, viscosity_run, TraceMeta};
use geofix::operators::check_nonexpansive;
use geofix::optimizer::{
    frechet_oracle, hyperbolic_halpern_gd, rsgd_run, OptConfig, ResolventSpec, StepSize, ORACLE_TOL,
};
use geofix::rates::{
    c_recursion_report, c_table, km_bound_report, p_n_report, pn_bound_report, visc_bound_report,
    visc_constants, BoundReport, BOUND_TOL,
};
use geofix::sampling::{point_in_ball, seeded, BallPairs};
use geofix::{
    IterationConfig, ModelSpace, Operator, OperatorSpec, Schedule, SeqSpace, SeqVector, Space, Trace,
};
use serde::Serialize;

use crate::config::{point, CheckConfig, Coords, ExperimentConfig, IterationKind, SpaceConfig};
use crate::CliError;

/// Radius of the ball `x0` is drawn from when the config leaves it out.
const X0_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub violated: bool,
    pub worst_margin: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub method: String,
    pub seed: u64,
    pub horizon: usize,
    pub checks: Vec<CheckOutcome>,
    pub violated: bool,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl RunOutcome {
    pub fn report_path(&self) -> PathBuf {
        self.out_dir.join("report.json")
    }
}

#[derive(Serialize)]
struct MetaFile<'a> {
    meta: &'a TraceMeta,
    seed: u64,
    config: &'a ExperimentConfig,
}

/// Collects bound reports and writes one CSV per check.
struct Reports<'a> {
    dir: &'a Path,
    out: Vec<CheckOutcome>,
    used: HashMap<String, usize>,
}

impl<'a> Reports<'a> {
    fn new(dir: &'a Path) -> Self {
        Self {
            dir,
            out: Vec::new(),
            used: HashMap::new(),
        }
    }

    fn add(&mut self, name: &str, report: &BoundReport) -> Result<(), CliError> {
        let count = self.used.entry(name.to_string()).or_insert(0);
        *count += 1;
        let file = if *count == 1 {
            format!("report_{name}.csv")
        } else {
            format!("report_{name}_{count}.csv")
        };
        let mut w = BufWriter::new(File::create(self.dir.join(&file))?);
        report.write_csv(&mut w)?;
        w.flush()?;
        self.out.push(CheckOutcome {
            name: name.into(),
            violated: report.violated,
            worst_margin: report.worst_margin,
            samples: report.rows.len(),
            csv: Some(file),
        });
        Ok(())
    }
}

fn write_trace<P>(dir: &Path, trace: &Trace<P>, cfg: &ExperimentConfig) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(dir.join("trace.csv"))?);
    trace.write_csv(&mut w)?;
    w.flush()?;
    let meta = MetaFile {
        meta: &trace.meta,
        seed: cfg.seed,
        config: cfg,
    };
    fs::write(
        dir.join("meta.json"),
        serde_json::to_string_pretty(&meta).expect("meta serializes"),
    )?;
    Ok(())
}

fn default_schedule(kind: IterationKind, f: Option<&OperatorSpec>) -> Schedule {
    match (kind, f) {
        (IterationKind::Viscosity, Some(f)) => Schedule::Viscosity {
            beta: f.lipschitz_bound(),
        },
        (IterationKind::Km, _) => Schedule::constant(0.5),
        (IterationKind::Picard, _) => Schedule::constant(1.0),
        _ => Schedule::Harmonic,
    }
}

fn drive<S>(
    space: &S,
    kind: IterationKind,
    op: &OperatorSpec,
    f: Option<&OperatorSpec>,
    icfg: &IterationConfig<S::Point>,
) -> Result<Trace<S::Point>, CliError>
where
    S: Space,
    OperatorSpec: Operator<S>,
{
    Ok(match kind {
        IterationKind::Km => km_run(space, op, icfg)?,
        IterationKind::Halpern => halpern_run(space, op, icfg)?,
        IterationKind::Picard => picard_run_with(space, op, icfg)?,
        IterationKind::Viscosity => viscosity_run(space, op, f.expect("validated"), icfg)?,
        IterationKind::HalpernGd | IterationKind::Rsgd => unreachable!("optimizer kinds run separately"),
    })
}

/// Checks that only need the trace and the schedule.
fn trace_checks<S: Space>(
    space: &S,
    trace: &Trace<S::Point>,
    schedule: &Schedule,
    checks: &[CheckConfig],
    reports: &mut Reports,
) -> Result<(), CliError> {
    let n = trace.meta.horizon;
    for c in checks {
        match c {
            CheckConfig::KmBound { diam } => {
                reports.add(c.name(), &km_bound_report(trace, schedule, *diam, BOUND_TOL)?)?;
            }
            CheckConfig::PnBound { diam } => {
                let pn = p_n_report(schedule, n + 1)?;
                reports.add(c.name(), &pn_bound_report(trace, &pn, *diam, BOUND_TOL))?;
            }
            CheckConfig::CRecursion { diam } => {
                let table = c_table(schedule, n)?;
                reports.add(
                    c.name(),
                    &c_recursion_report(space, trace, &table, *diam, BOUND_TOL)?,
                )?;
            }
            _ => {}
        }
    }
    Ok(())
}

fn model_space(cfg: &ExperimentConfig) -> Result<Option<ModelSpace>, CliError> {
    match cfg.space {
        SpaceConfig::Model { kappa, dim } => Ok(Some(ModelSpace::new(kappa, dim)?)),
        SpaceConfig::Sequence => Ok(None),
    }
}

/// Run one experiment and write `trace.csv`, `meta.json`, `report.json` and
/// a CSV per bound check into `out_dir`. Violations are reported through
/// [`RunOutcome::violated`].
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut reports = Reports::new(out_dir);
    let it = &cfg.iteration;
    let needs_iterates = it.store_iterates
        || cfg
            .checks
            .iter()
            .any(|c| matches!(c, CheckConfig::CRecursion { .. }));

    let method = match model_space(cfg)? {
        Some(space) => {
            let mut rng = seeded(cfg.seed);
            let x0 = match &it.x0 {
                Some(c) => point(&space, c, "iteration.x0")?,
                None => point_in_ball(&space, &space.base_point(), X0_RADIUS, &mut rng)?,
            };
            let opt_point =
                |c: &Option<Coords>, path: &str| c.as_ref().map(|c| point(&space, c, path)).transpose();
            let fixed = opt_point(&it.fixed_point, "iteration.fixed_point")?;
            let u = opt_point(&it.u, "iteration.u")?;
            match it.kind {
                IterationKind::HalpernGd | IterationKind::Rsgd => {
                    let objective = cfg
                        .objective
                        .as_ref()
                        .expect("validated")
                        .build(&space, "objective")?;
                    let oracle = match fixed {
                        Some(p) => p,
                        None => frechet_oracle(&space, &objective, ORACLE_TOL)?,
                    };
                    let ocfg = OptConfig::new(x0, it.horizon)
                        .with_oracle(oracle)
                        .with_seed(cfg.seed);
                    let run = if it.kind == IterationKind::HalpernGd {
                        let spec = ResolventSpec::numeric(objective, it.lambda.unwrap_or(1.0))?;
                        let schedule = it.schedule.clone().unwrap_or(Schedule::Harmonic);
                        hyperbolic_halpern_gd(&space, &spec, u, schedule, &ocfg)?
                    } else {
                        rsgd_run(
                            &space,
                            &objective,
                            &StepSize::Constant(it.step.unwrap_or(1.0)),
                            &ocfg,
                        )?
                    };
                    write_trace(out_dir, &run.trace, cfg)?;
                    let mut w = BufWriter::new(File::create(out_dir.join("optimizer.csv"))?);
                    run.write_csv(&mut w)?;
                    w.flush()?;
                    for c in &cfg.checks {
                        if let CheckConfig::Nonexpansive { pairs, radius } = c {
                            let spec = ResolventSpec::numeric(
                                cfg.objective
                                    .as_ref()
                                    .expect("validated")
                                    .build(&space, "objective")?,
                                it.lambda.unwrap_or(1.0),
                            )?;
                            nonexpansive(&mut reports, &spec, &space, *pairs, *radius, cfg.seed)?;
                        }
                    }
                    run.trace.meta.method.clone()
                }
                kind => {
                    let op = cfg
                        .operator
                        .as_ref()
                        .expect("validated")
                        .build(Some(&space), "operator")?;
                    let f =
                        it.f.as_ref()
                            .map(|f| f.build(Some(&space), "iteration.f"))
                            .transpose()?;
                    let schedule = it
                        .schedule
                        .clone()
                        .unwrap_or_else(|| default_schedule(kind, f.as_ref()));
                    let mut icfg =
                        IterationConfig::new(x0.clone(), it.horizon, schedule.clone()).with_seed(cfg.seed);
                    icfg.anchor = u;
                    icfg.fixed_point = fixed;
                    icfg.store_iterates = needs_iterates;
                    if let Some(conv) = it.convention {
                        icfg = icfg.with_convention(conv);
                    }
                    let trace = drive(&space, kind, &op, f.as_ref(), &icfg)?;
                    write_trace(out_dir, &trace, cfg)?;
                    trace_checks(&space, &trace, &schedule, &cfg.checks, &mut reports)?;
                    for (i, c) in cfg.checks.iter().enumerate() {
                        match c {
                            CheckConfig::ViscBound { xbar } => {
                                let xbar = point(&space, xbar, &format!("checks[{i}].xbar"))?;
                                let f = f.as_ref().expect("validated");
                                let consts = visc_constants(&space, &x0, &xbar, f, f.lipschitz_bound())?;
                                let rep = visc_bound_report(&trace, &consts, BOUND_TOL)?;
                                reports.add("visc_step", &rep.steps)?;
                                reports.add("visc_residual", &rep.residuals)?;
                            }
                            CheckConfig::Nonexpansive { pairs, radius } => {
                                nonexpansive(&mut reports, &op, &space, *pairs, *radius, cfg.seed)?;
                            }
                            _ => {}
                        }
                    }
                    trace.meta.method.clone()
                }
            }
        }
        None => {
            if let Some(i) = cfg.checks.iter().position(|c| {
                matches!(
                    c,
                    CheckConfig::ViscBound { .. } | CheckConfig::Nonexpansive { .. }
                )
            }) {
                return Err(CliError::Usage(format!("checks[{i}]: needs a model space")));
            }
            let space = SeqSpace::for_horizon(it.horizon);
            let seq = |c: &Coords, path: &str| -> Result<SeqVector, CliError> {
                if c.len() > space.len {
                    return Err(CliError::Usage(format!(
                        "{path}: {} entries exceed the sequence length {}",
                        c.len(),
                        space.len
                    )));
                }
                let mut entries = c.clone();
                entries.resize(space.len, 0.0);
                Ok(SeqVector { entries })
            };
            let x0 = match &it.x0 {
                Some(c) => seq(c, "iteration.x0")?,
                None => SeqVector::basis(space.len, 0),
            };
            let op = cfg
                .operator
                .as_ref()
                .expect("validated")
                .build(None, "operator")?;
            let schedule = it
                .schedule
                .clone()
                .unwrap_or_else(|| default_schedule(it.kind, None));
            let mut icfg = IterationConfig::new(x0, it.horizon, schedule.clone()).with_seed(cfg.seed);
            icfg.anchor = it.u.as_ref().map(|c| seq(c, "iteration.u")).transpose()?;
            icfg.fixed_point = it
                .fixed_point
                .as_ref()
                .map(|c| seq(c, "iteration.fixed_point"))
                .transpose()?;
            icfg.store_iterates = needs_iterates;
            if let Some(conv) = it.convention {
                icfg = icfg.with_convention(conv);
            }
            let trace = drive(&space, it.kind, &op, None, &icfg)?;
            write_trace(out_dir, &trace, cfg)?;
            trace_checks(&space, &trace, &schedule, &cfg.checks, &mut reports)?;
            trace.meta.method.clone()
        }
    };

    let violated = reports.out.iter().any(|c| c.violated);
    let outcome = RunOutcome {
        method,
        seed: cfg.seed,
        horizon: it.horizon,
        checks: reports.out,
        violated,
        out_dir: out_dir.to_path_buf(),
    };
    fs::write(
        outcome.report_path(),
        serde_json::to_string_pretty(&outcome).expect("report serializes"),
    )?;
    Ok(outcome)
}

fn nonexpansive<O: Operator<ModelSpace>>(
    reports: &mut Reports,
    op: &O,
    space: &ModelSpace,
    pairs: usize,
    radius: f64,
    seed: u64,
) -> Result<(), CliError> {
    let center = space.base_point();
    let r = check_nonexpansive(
        op,
        space,
        BallPairs::new(*space, center, radius, seed).take(pairs),
        BOUND_TOL,
    )?;
    let excess = r
        .max_excess
        .max(r.max_contraction_excess.unwrap_or(f64::NEG_INFINITY));
    reports.out.push(CheckOutcome {
        name: "nonexpansive".into(),
        violated: !r.pass,
        worst_margin: -excess,
        samples: r.trials,
        csv: None,
    });
    Ok(())
}
