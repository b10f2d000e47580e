//! HalpernGD against RSGD on a Fréchet mean problem.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use geofix::optimizer::{
    frechet_oracle, hyperbolic_halpern_gd, rsgd_run, Objective, OptConfig, OptRun, ResolventSpec, StepSize,
    ORACLE_TOL,
};
use geofix::sampling::{point_in_ball, seeded};
use geofix::verify::k_residual_growth;
use geofix::{ModelSpace, Schedule};
use serde::{Deserialize, Serialize};

use crate::config::{point, Coords, SpaceConfig};
use crate::CliError;

/// Distance used to report when RSGD first reaches the oracle.
const HIT_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub space: SpaceConfig,
    /// Sampled around the base point when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<Vec<Coords>>,
    #[serde(default = "default_count")]
    pub n_anchors: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Base point when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Coords>,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "one")]
    pub rsgd_step: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_count() -> usize {
    5
}

fn default_radius() -> f64 {
    1.5
}

fn one() -> f64 {
    1.0
}

fn default_horizon() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub final_dist: f64,
    pub final_residual: f64,
    pub final_objective: f64,
    pub first_within: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchOutcome {
    pub oracle: Vec<f64>,
    pub horizon: usize,
    pub halpern_gd: MethodResult,
    /// `max_k k·d(x_k, J_λ x_k)`.
    pub max_k_residual: f64,
    /// Late over early maximum of `k·d(x_k, J_λ x_k)`.
    pub growth_ratio: f64,
    pub rsgd: MethodResult,
}

fn result(run: &OptRun) -> MethodResult {
    let last = run.trace.last();
    MethodResult {
        final_dist: last.dist_to_fix.unwrap_or(f64::NAN),
        final_residual: last.residual,
        final_objective: *run.objective_values.last().expect("runs hold x_0"),
        first_within: run
            .trace
            .rows
            .iter()
            .find(|r| r.dist_to_fix.is_some_and(|d| d <= HIT_RADIUS))
            .map(|r| r.n),
    }
}

fn write_run(path: &Path, run: &OptRun) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    run.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Writes `halpern_gd.csv`, `rsgd.csv` and `bench.json` into `out_dir`.
pub fn run_bench(cfg: &BenchConfig, out_dir: &Path) -> Result<BenchOutcome, CliError> {
    let space = match cfg.space {
        SpaceConfig::Model { kappa, dim } => ModelSpace::new(kappa, dim)?,
        SpaceConfig::Sequence => {
            return Err(CliError::Usage("space: the benchmark needs a model space".into()))
        }
    };
    let mut rng = seeded(cfg.seed);
    let base = space.base_point();
    let anchors = match &cfg.anchors {
        Some(list) => list
            .iter()
            .enumerate()
            .map(|(i, c)| point(&space, c, &format!("anchors[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        None => (0..cfg.n_anchors)
            .map(|_| point_in_ball(&space, &base, cfg.radius, &mut rng))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let objective = match &cfg.weights {
        Some(w) => Objective::frechet(anchors, w.clone()),
        None => Objective::frechet_equal(anchors),
    }
    .map_err(|e| CliError::Usage(format!("weights: {e}")))?;
    let x0 = match &cfg.x0 {
        Some(c) => point(&space, c, "x0")?,
        None => base,
    };
    let oracle = frechet_oracle(&space, &objective, ORACLE_TOL)?;
    let ocfg = OptConfig::new(x0, cfg.horizon)
        .with_oracle(oracle.clone())
        .with_seed(cfg.seed);
    let spec = ResolventSpec::numeric(objective.clone(), cfg.lambda)?;
    let halpern = hyperbolic_halpern_gd(&space, &spec, None, Schedule::Harmonic, &ocfg)?;
    let rsgd = rsgd_run(&space, &objective, &StepSize::Constant(cfg.rsgd_step), &ocfg)?;

    fs::create_dir_all(out_dir)?;
    write_run(&out_dir.join("halpern_gd.csv"), &halpern)?;
    write_run(&out_dir.join("rsgd.csv"), &rsgd)?;
    let (max_k_residual, growth_ratio) = k_residual_growth(&halpern);
    let outcome = BenchOutcome {
        oracle: oracle.coords().to_vec(),
        horizon: cfg.horizon,
        halpern_gd: result(&halpern),
        max_k_residual,
        growth_ratio,
        rsgd: result(&rsgd),
    };
    fs::write(
        out_dir.join("bench.json"),
        serde_json::to_string_pretty(&outcome).expect("bench serializes"),
    )?;
    Ok(outcome)
}
