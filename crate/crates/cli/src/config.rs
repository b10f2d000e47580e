//! Experiment configuration files.

use std::path::{Path, PathBuf};

use geofix::iteration::Schedule;
use geofix::operators::Gradient;
use geofix::optimizer::Objective;
use geofix::{AnchorConvention, ModelSpace, OperatorSpec, Point};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Where the iteration lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceConfig {
    /// Model space `M_κⁿ`.
    Model { kappa: f64, dim: usize },
    /// Finite ℓ¹ prefixes of length `horizon + 2`.
    Sequence,
}

/// Points are written as spatial coordinates; the hyperboloid time
/// coordinate is filled in.
pub type Coords = Vec<f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorConfig {
    Identity,
    PlanarRotation {
        angle: f64,
    },
    EllipticRotation {
        angle: f64,
    },
    RightShift,
    GeodesicContraction {
        center: Coords,
        beta: f64,
    },
    /// Forward step on `½ Σ dᵢ (xᵢ − cᵢ)²`; `L` defaults to `max dᵢ`.
    Forward {
        diag: Vec<f64>,
        center: Coords,
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lipschitz: Option<f64>,
    },
    ConstantAnchor {
        u: Coords,
    },
    Dilation {
        center: Coords,
        factor: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationKind {
    Km,
    Halpern,
    Viscosity,
    Picard,
    HalpernGd,
    Rsgd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationSection {
    pub kind: IterationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
    pub horizon: usize,
    /// Sampled from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Coords>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Coords>,
    /// Contraction used by the viscosity iteration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<OperatorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<AnchorConvention>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<Coords>,
    /// Proximal scale for `halpern_gd`, default 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Constant step for `rsgd`, default 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub store_iterates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveConfig {
    HalfSqDist {
        anchor: Coords,
    },
    /// Equal weights when `weights` is absent.
    Frechet {
        anchors: Vec<Coords>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckConfig {
    KmBound { diam: f64 },
    PnBound { diam: f64 },
    CRecursion { diam: f64 },
    ViscBound { xbar: Coords },
    Nonexpansive { pairs: usize, radius: f64 },
}

impl CheckConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CheckConfig::KmBound { .. } => "km_bound",
            CheckConfig::PnBound { .. } => "pn_bound",
            CheckConfig::CRecursion { .. } => "c_recursion",
            CheckConfig::ViscBound { .. } => "visc_bound",
            CheckConfig::Nonexpansive { .. } => "nonexpansive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorConfig>,
    pub iteration: IterationSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveConfig>,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn usage(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{path}: {msg}"))
}

/// Parse JSON, reporting the field path of the first error.
pub fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        usage(if path == "." { "config" } else { &path }, e.inner())
    })
}

pub fn read<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub(crate) fn point(space: &ModelSpace, coords: &[f64], path: &str) -> Result<Point, CliError> {
    space.from_spatial(coords).map_err(|e| usage(path, e))
}

impl OperatorConfig {
    pub fn build(&self, space: Option<&ModelSpace>, path: &str) -> Result<OperatorSpec, CliError> {
        let pt = |c: &Coords, field: &str| match space {
            Some(s) => point(s, c, &format!("{path}.{field}")),
            None => Err(usage(path, "needs a model space")),
        };
        let spec = match self {
            OperatorConfig::Identity => OperatorSpec::Identity,
            OperatorConfig::PlanarRotation { angle } => OperatorSpec::PlanarRotation { angle: *angle },
            OperatorConfig::EllipticRotation { angle } => OperatorSpec::EllipticRotation { angle: *angle },
            OperatorConfig::RightShift => OperatorSpec::RightShift,
            OperatorConfig::GeodesicContraction { center, beta } => {
                OperatorSpec::geodesic_contraction(pt(center, "center")?, *beta)
                    .map_err(|e| usage(path, e))?
            }
            OperatorConfig::Forward {
                diag,
                center,
                beta,
                lipschitz,
            } => {
                let l = lipschitz.unwrap_or_else(|| diag.iter().cloned().fold(0.0, f64::max));
                let gradient = Gradient::Quadratic {
                    diag: diag.clone(),
                    center: center.clone(),
                };
                OperatorSpec::forward(gradient, *beta, l).map_err(|e| usage(path, e))?
            }
            OperatorConfig::ConstantAnchor { u } => OperatorSpec::ConstantAnchor { u: pt(u, "u")? },
            OperatorConfig::Dilation { center, factor } => OperatorSpec::Dilation {
                center: pt(center, "center")?,
                factor: *factor,
            },
        };
        spec.validate().map_err(|e| usage(path, e))?;
        Ok(spec)
    }
}

impl ObjectiveConfig {
    pub fn build(&self, space: &ModelSpace, path: &str) -> Result<Objective, CliError> {
        match self {
            ObjectiveConfig::HalfSqDist { anchor } => Ok(Objective::half_sq_dist(point(
                space,
                anchor,
                &format!("{path}.anchor"),
            )?)),
            ObjectiveConfig::Frechet { anchors, weights } => {
                let pts = anchors
                    .iter()
                    .enumerate()
                    .map(|(i, a)| point(space, a, &format!("{path}.anchors[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                match weights {
                    Some(w) => Objective::frechet(pts, w.clone()),
                    None => Objective::frechet_equal(pts),
                }
                .map_err(|e| usage(path, e))
            }
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let cfg: Self = read(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    /// Kind-specific requirements that the schema alone cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        let it = &self.iteration;
        let needs_operator = matches!(
            it.kind,
            IterationKind::Km | IterationKind::Halpern | IterationKind::Viscosity | IterationKind::Picard
        );
        if needs_operator && self.operator.is_none() {
            return Err(usage(
                "operator",
                format!("required for {:?} iterations", it.kind),
            ));
        }
        if it.kind == IterationKind::Halpern && it.u.is_none() {
            return Err(usage("iteration.u", "halpern iterations need an anchor"));
        }
        if it.kind == IterationKind::Viscosity && it.f.is_none() {
            return Err(usage("iteration.f", "viscosity iterations need a contraction"));
        }
        if matches!(it.kind, IterationKind::HalpernGd | IterationKind::Rsgd) && self.objective.is_none() {
            return Err(usage("objective", format!("required for {:?}", it.kind)));
        }
        if self.space == SpaceConfig::Sequence
            && !matches!(
                it.kind,
                IterationKind::Km | IterationKind::Halpern | IterationKind::Picard
            )
        {
            return Err(usage(
                "space",
                "sequence space supports km, halpern and picard only",
            ));
        }
        if let SpaceConfig::Model { kappa, dim } = self.space {
            ModelSpace::new(kappa, dim).map_err(|e| usage("space", e))?;
        }
        for (i, c) in self.checks.iter().enumerate() {
            let path = format!("checks[{i}]");
            match c {
                CheckConfig::KmBound { diam }
                | CheckConfig::PnBound { diam }
                | CheckConfig::CRecursion { diam }
                    if !(*diam > 0.0) =>
                {
                    return Err(usage(&path, "diam must be positive"));
                }
                CheckConfig::KmBound { .. }
                | CheckConfig::PnBound { .. }
                | CheckConfig::CRecursion { .. }
                    if it.kind != IterationKind::Km =>
                {
                    return Err(usage(&path, format!("{} applies to km iterations", c.name())));
                }
                CheckConfig::ViscBound { .. } if it.kind != IterationKind::Viscosity => {
                    return Err(usage(&path, "visc_bound applies to viscosity iterations"));
                }
                CheckConfig::Nonexpansive { pairs: 0, .. } => {
                    return Err(usage(&path, "pairs must be positive"));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Apply command line overrides.
    pub fn with_overrides(mut self, seed: Option<u64>, horizon: Option<usize>) -> Self {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(h) = horizon {
            self.iteration.horizon = h;
        }
        self
    }
}
