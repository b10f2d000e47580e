//! Nonexpansive maps and contractions used as iteration targets.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, ModelSpace, Point, Space};

/// A map on the points of a [`Space`].
pub trait Operator<S: Space> {
    fn apply(&self, space: &S, x: &S::Point) -> Result<S::Point>;

    /// Lipschitz constant when the operator is known to be a contraction
    /// (factor < 1) or nonexpansive (factor 1).
    fn lipschitz(&self) -> Option<f64> {
        None
    }

    fn label(&self) -> String {
        "custom".into()
    }
}

/// Adapter turning a closure into an [`Operator`].
pub struct FnOperator<F> {
    f: F,
    lipschitz: Option<f64>,
}

impl<F> FnOperator<F> {
    pub fn new(f: F) -> Self {
        Self { f, lipschitz: None }
    }

    pub fn with_lipschitz(f: F, lipschitz: f64) -> Self {
        Self {
            f,
            lipschitz: Some(lipschitz),
        }
    }
}

impl<S, F> Operator<S> for FnOperator<F>
where
    S: Space,
    F: Fn(&S, &S::Point) -> Result<S::Point>,
{
    fn apply(&self, space: &S, x: &S::Point) -> Result<S::Point> {
        (self.f)(space, x)
    }

    fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }
}

type GradientClosure = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Shared gradient oracle `x ↦ ∇f(x)` on flat coordinates.
#[derive(Clone)]
pub struct GradFn(pub Arc<GradientClosure>);

impl fmt::Debug for GradFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GradFn(..)")
    }
}

impl PartialEq for GradFn {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

/// Gradient of a convex, L-smooth function on ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub enum Gradient {
    /// `f(x) = ½‖x‖²`, `∇f(x) = x`.
    HalfSqNorm,
    /// `f(x) = ½ Σ dᵢ (xᵢ − cᵢ)²` with `dᵢ ≥ 0`.
    Quadratic {
        diag: Vec<f64>,
        center: Vec<f64>,
    },
    Custom(GradFn),
}

impl Gradient {
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Gradient::HalfSqNorm => Ok(x.to_vec()),
            Gradient::Quadratic { diag, center } => {
                if diag.len() != x.len() || center.len() != x.len() {
                    return Err(Error::DimensionMismatch {
                        expected: diag.len(),
                        found: x.len(),
                    });
                }
                Ok(x.iter()
                    .zip(diag)
                    .zip(center)
                    .map(|((xi, d), c)| d * (xi - c))
                    .collect())
            }
            Gradient::Custom(g) => Ok((g.0)(x)),
        }
    }
}

/// The operator zoo. Construct the validated kinds through the associated
/// functions ([`OperatorSpec::forward`], [`OperatorSpec::geodesic_contraction`]).
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    Identity,
    /// Counterclockwise rotation of the first two coordinates of ℝⁿ.
    PlanarRotation {
        angle: f64,
    },
    /// Rotation of the spatial coordinates `(u₁, u₂)` of the hyperboloid,
    /// leaving `u₀` fixed. A Minkowski isometry fixing the base point.
    EllipticRotation {
        angle: f64,
    },
    /// `(x₀, x₁, …) ↦ (0, x₀, x₁, …)` on finite ℓ¹ prefixes.
    RightShift,
    /// `x ↦ (1−β)c ⊕ βx`, a β-Lipschitz map with fixed point `c`.
    GeodesicContraction {
        center: Point,
        beta: f64,
    },
    /// Forward step `x ↦ x − β∇f(x)`, averaged for `0 < β < 2/L`.
    Forward {
        gradient: Gradient,
        beta: f64,
        lipschitz: f64,
    },
    ConstantAnchor {
        u: Point,
    },
    /// `x ↦ c + s(x − c)` on ℝⁿ; expansive for `s > 1`.
    Dilation {
        center: Point,
        factor: f64,
    },
}

impl OperatorSpec {
    pub fn forward(gradient: Gradient, beta: f64, lipschitz: f64) -> Result<Self> {
        let op = OperatorSpec::Forward {
            gradient,
            beta,
            lipschitz,
        };
        op.validate()?;
        Ok(op)
    }

    pub fn geodesic_contraction(center: Point, beta: f64) -> Result<Self> {
        let op = OperatorSpec::GeodesicContraction { center, beta };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::Forward { beta, lipschitz, .. } => {
                if !(*lipschitz > 0.0) {
                    return Err(Error::InvalidOperator(format!(
                        "forward step needs a positive Lipschitz constant, got {lipschitz}"
                    )));
                }
                if !(*beta > 0.0 && *beta < 2.0 / lipschitz) {
                    return Err(Error::InvalidOperator(format!(
                        "forward step {beta} outside (0, 2/L) = (0, {})",
                        2.0 / lipschitz
                    )));
                }
                Ok(())
            }
            OperatorSpec::GeodesicContraction { beta, .. } => {
                if !(0.0..1.0).contains(beta) {
                    return Err(Error::InvalidContraction(*beta));
                }
                Ok(())
            }
            OperatorSpec::Dilation { factor, .. } if !(*factor >= 0.0) => Err(Error::InvalidOperator(
                format!("dilation factor {factor} must be nonnegative"),
            )),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorSpec::Identity => "identity",
            OperatorSpec::PlanarRotation { .. } => "planar_rotation",
            OperatorSpec::EllipticRotation { .. } => "elliptic_rotation",
            OperatorSpec::RightShift => "right_shift",
            OperatorSpec::GeodesicContraction { .. } => "geodesic_contraction",
            OperatorSpec::Forward { .. } => "forward",
            OperatorSpec::ConstantAnchor { .. } => "constant_anchor",
            OperatorSpec::Dilation { .. } => "dilation",
        }
    }

    /// Lipschitz constant implied by the kind.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            OperatorSpec::GeodesicContraction { beta, .. } => *beta,
            OperatorSpec::ConstantAnchor { .. } => 0.0,
            OperatorSpec::Dilation { factor, .. } => *factor,
            _ => 1.0,
        }
    }

    pub fn is_nonexpansive(&self) -> bool {
        self.lipschitz_bound() <= 1.0
    }
}

fn rotate(coords: &mut [f64], i: usize, j: usize, angle: f64) {
    let (s, c) = angle.sin_cos();
    let (a, b) = (coords[i], coords[j]);
    coords[i] = c * a - s * b;
    coords[j] = s * a + c * b;
}

fn require(space: &ModelSpace, geometry: Geometry, what: &str) -> Result<()> {
    if space.geometry() != geometry {
        return Err(Error::Domain(format!(
            "{what} is not defined on a space of curvature {}",
            space.curvature()
        )));
    }
    Ok(())
}

impl Operator<ModelSpace> for OperatorSpec {
    fn apply(&self, space: &ModelSpace, x: &Point) -> Result<Point> {
        if x.space() != space {
            return Err(Error::SpaceMismatch);
        }
        match self {
            OperatorSpec::Identity => Ok(x.clone()),
            OperatorSpec::PlanarRotation { angle } => {
                require(space, Geometry::Euclidean, "planar_rotation")?;
                if space.dim() < 2 {
                    return Err(Error::Domain("planar_rotation needs dimension >= 2".into()));
                }
                let mut c = x.coords().to_vec();
                rotate(&mut c, 0, 1, *angle);
                space.point(c)
            }
            OperatorSpec::EllipticRotation { angle } => {
                require(space, Geometry::Hyperbolic, "elliptic_rotation")?;
                if space.dim() < 2 {
                    return Err(Error::Domain("elliptic_rotation needs dimension >= 2".into()));
                }
                let mut c = x.coords().to_vec();
                rotate(&mut c, 1, 2, *angle);
                space.point(c)
            }
            OperatorSpec::RightShift => Err(Error::Domain(
                "right_shift acts on sequence space, not on a model space".into(),
            )),
            OperatorSpec::GeodesicContraction { center, beta } => {
                self.validate()?;
                space.combine(center, x, *beta)
            }
            OperatorSpec::Forward { gradient, beta, .. } => {
                self.validate()?;
                require(space, Geometry::Euclidean, "forward")?;
                let g = gradient.eval(x.coords())?;
                if g.len() != x.coords().len() {
                    return Err(Error::DimensionMismatch {
                        expected: x.coords().len(),
                        found: g.len(),
                    });
                }
                let c = x.coords().iter().zip(&g).map(|(a, b)| a - beta * b).collect();
                space.point(c)
            }
            OperatorSpec::ConstantAnchor { u } => {
                if u.space() != space {
                    return Err(Error::SpaceMismatch);
                }
                Ok(u.clone())
            }
            OperatorSpec::Dilation { center, factor } => {
                self.validate()?;
                require(space, Geometry::Euclidean, "dilation")?;
                let c = x
                    .coords()
                    .iter()
                    .zip(center.coords())
                    .map(|(a, o)| o + factor * (a - o))
                    .collect();
                space.point(c)
            }
        }
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz_bound())
    }

    fn label(&self) -> String {
        self.name().into()
    }
}

/// Finite prefix of an ℓ¹ sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqVector {
    pub entries: Vec<f64>,
}

impl SeqVector {
    pub fn basis(len: usize, index: usize) -> Self {
        let mut entries = vec![0.0; len];
        entries[index] = 1.0;
        Self { entries }
    }

    pub fn norm_l1(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).sum()
    }
}

/// ℓ¹ prefixes of fixed length, with linear interpolation as `⊕`.
///
/// The length must be at least the iteration horizon + 2 so that a right
/// shift never loses mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeqSpace {
    pub len: usize,
}

impl SeqSpace {
    pub fn for_horizon(horizon: usize) -> Self {
        Self { len: horizon + 2 }
    }

    fn check(&self, x: &SeqVector) -> Result<()> {
        if x.entries.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: x.entries.len(),
            });
        }
        Ok(())
    }
}

impl Space for SeqSpace {
    type Point = SeqVector;

    fn dist(&self, x: &SeqVector, y: &SeqVector) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(x.entries.iter().zip(&y.entries).map(|(a, b)| (a - b).abs()).sum())
    }

    fn combine(&self, x: &SeqVector, y: &SeqVector, t: f64) -> Result<SeqVector> {
        self.check(x)?;
        self.check(y)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(t));
        }
        let entries = x
            .entries
            .iter()
            .zip(&y.entries)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect();
        Ok(SeqVector { entries })
    }
}

impl Operator<SeqSpace> for OperatorSpec {
    fn apply(&self, space: &SeqSpace, x: &SeqVector) -> Result<SeqVector> {
        space.check(x)?;
        match self {
            OperatorSpec::Identity => Ok(x.clone()),
            OperatorSpec::RightShift => {
                if x.entries.last().is_some_and(|&v| v != 0.0) {
                    return Err(Error::Domain(
                        "right shift would push mass past the stored horizon".into(),
                    ));
                }
                let mut entries = Vec::with_capacity(space.len);
                entries.push(0.0);
                entries.extend_from_slice(&x.entries[..space.len - 1]);
                Ok(SeqVector { entries })
            }
            other => Err(Error::Domain(format!(
                "{} is not defined on sequence space",
                other.name()
            ))),
        }
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }

    fn label(&self) -> String {
        self.name().into()
    }
}

/// Outcome of a sampled Lipschitz check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonexpansiveReport {
    pub trials: usize,
    /// `max (d(Tx,Ty) − d(x,y))`.
    pub max_excess: f64,
    /// `max (d(Tx,Ty) − β·d(x,y))` for operators with factor β < 1.
    pub max_contraction_excess: Option<f64>,
    pub pass: bool,
}

/// Check `d(Tx, Ty) ≤ d(x, y) + tol` over the supplied pairs; for operators
/// advertising a factor `β < 1`, also `d(Tx, Ty) ≤ β·d(x, y) + tol`.
pub fn check_nonexpansive<S, O, I>(op: &O, space: &S, pairs: I, tol: f64) -> Result<NonexpansiveReport>
where
    S: Space,
    O: Operator<S> + ?Sized,
    I: IntoIterator<Item = (S::Point, S::Point)>,
{
    let factor = op.lipschitz().filter(|&b| b < 1.0);
    let mut trials = 0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_contraction = factor.map(|_| f64::NEG_INFINITY);
    for (x, y) in pairs {
        let d = space.dist(&x, &y)?;
        let dt = space.dist(&op.apply(space, &x)?, &op.apply(space, &y)?)?;
        max_excess = max_excess.max(dt - d);
        if let (Some(m), Some(b)) = (max_contraction.as_mut(), factor) {
            *m = m.max(dt - b * d);
        }
        trials += 1;
    }
    let pass = trials > 0 && max_excess <= tol && max_contraction.is_none_or(|m| m <= tol);
    Ok(NonexpansiveReport {
        trials,
        max_excess,
        max_contraction_excess: max_contraction,
        pass,
    })
}
