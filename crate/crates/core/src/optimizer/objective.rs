use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{ModelSpace, Point, TangentVector};

/// Tolerance on `Σ wᵢ = 1` for Fréchet weights.
pub const WEIGHT_TOL: f64 = 1e-12;

type ValueFn = dyn Fn(&ModelSpace, &Point) -> Result<f64> + Send + Sync;
type GradientFn = dyn Fn(&ModelSpace, &Point) -> Result<TangentVector> + Send + Sync;

/// User supplied value and Riemannian gradient oracles.
#[derive(Clone)]
pub struct CustomObjective {
    pub value: Arc<ValueFn>,
    pub gradient: Arc<GradientFn>,
}

impl fmt::Debug for CustomObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomObjective")
    }
}

/// Geodesically convex objectives on a model space.
#[derive(Debug, Clone)]
pub enum Objective {
    /// `½ d(y, a)²`.
    HalfSqDist {
        anchor: Point,
    },
    /// `Σ wᵢ ½ d(y, aᵢ)²` with nonnegative weights summing to one.
    Frechet {
        anchors: Vec<Point>,
        weights: Vec<f64>,
    },
    Custom(CustomObjective),
}

impl Objective {
    pub fn half_sq_dist(anchor: Point) -> Self {
        Objective::HalfSqDist { anchor }
    }

    pub fn frechet(anchors: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::InvalidObjective("no anchors".into()));
        }
        if anchors.len() != weights.len() {
            return Err(Error::InvalidObjective(format!(
                "{} anchors but {} weights",
                anchors.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidObjective("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidObjective(format!("weights sum to {total}")));
        }
        if anchors.iter().any(|a| a.space() != anchors[0].space()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Objective::Frechet { anchors, weights })
    }

    /// Equal weights `1/m`.
    pub fn frechet_equal(anchors: Vec<Point>) -> Result<Self> {
        let w = 1.0 / anchors.len() as f64;
        let mut weights = vec![w; anchors.len()];
        // keep the sum within tolerance for awkward m
        if let Some(last) = weights.last_mut() {
            *last = 1.0 - w * (anchors.len() - 1) as f64;
        }
        Self::frechet(anchors, weights)
    }

    pub fn custom<V, G>(value: V, gradient: G) -> Self
    where
        V: Fn(&ModelSpace, &Point) -> Result<f64> + Send + Sync + 'static,
        G: Fn(&ModelSpace, &Point) -> Result<TangentVector> + Send + Sync + 'static,
    {
        Objective::Custom(CustomObjective {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::HalfSqDist { .. } => "half_sq_dist",
            Objective::Frechet { .. } => "frechet",
            Objective::Custom(_) => "custom",
        }
    }

    pub fn value(&self, space: &ModelSpace, y: &Point) -> Result<f64> {
        match self {
            Objective::HalfSqDist { anchor } => Ok(0.5 * space.dist(y, anchor)?.powi(2)),
            Objective::Frechet { anchors, weights } => {
                let mut acc = 0.0;
                for (a, w) in anchors.iter().zip(weights) {
                    acc += w * 0.5 * space.dist(y, a)?.powi(2);
                }
                Ok(acc)
            }
            Objective::Custom(c) => (c.value)(space, y),
        }
    }

    /// Riemannian gradient at `y`; for `½ d(·, a)²` this is `−log_y(a)`.
    pub fn gradient(&self, space: &ModelSpace, y: &Point) -> Result<TangentVector> {
        match self {
            Objective::HalfSqDist { anchor } => Ok(space.log_map(y, anchor)?.scaled(-1.0)),
            Objective::Frechet { anchors, weights } => {
                let mut g = TangentVector::zero(y.clone());
                for (a, w) in anchors.iter().zip(weights) {
                    g = g.add_scaled(&space.log_map(y, a)?, -w)?;
                }
                Ok(g)
            }
            Objective::Custom(c) => (c.gradient)(space, y),
        }
    }

    /// A point to start minimization from, when the objective has one.
    pub(crate) fn start_hint(&self) -> Option<&Point> {
        match self {
            Objective::HalfSqDist { anchor } => Some(anchor),
            Objective::Frechet { anchors, weights } => anchors
                .iter()
                .zip(weights)
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(a, _)| a),
            Objective::Custom(_) => None,
        }
    }
}
