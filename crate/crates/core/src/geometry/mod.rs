//! Model spaces `M_κⁿ` and their geodesic structure.
//!
//! All κ < 0 spaces are realized on the unit hyperboloid
//! `{u : ⟨u,u⟩_L = −1, u₀ > 0}` and κ > 0 spaces on the unit sphere; the
//! curvature only rescales distances by `1/√|κ|`. Geodesics, and therefore
//! [`ModelSpace::combine`], do not depend on the scale.
//!
//! Tangent vectors are stored as ambient coordinates of the unit model. Their
//! length in the scaled metric is [`ModelSpace::tangent_norm`], so that
//! `tangent_norm(log_map(x, y)) == dist(x, y)` for every κ.

mod triangle;

pub use triangle::{cat_comparison_excess, comparison_triangle, ComparisonTriangle, Side};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used to clamp `arcosh`/`arccos` arguments that fall just outside
/// their domain.
pub const DOMAIN_CLAMP: f64 = 1e-9;

/// Model constraint tolerance reported by [`validate_point`].
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Admission tolerance of [`Point::new`] before renormalization.
const ADMIT_TOL: f64 = 1e-9;

/// Minkowski (Lorentzian) inner product `−u₀v₀ + Σ_{i≥1} uᵢvᵢ`.
pub fn minkowski_inner(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    if u.len() < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.len(),
        });
    }
    Ok(lorentz(u, v))
}

#[inline]
fn lorentz(u: &[f64], v: &[f64]) -> f64 {
    let space: f64 = u[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
    space - u[0] * v[0]
}

#[inline]
fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

#[inline]
fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

fn diff(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

/// Sign class of the curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Euclidean,
    Spherical,
    Hyperbolic,
}

/// Curvature/dimension descriptor of a model space `M_κⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace")]
pub struct ModelSpace {
    #[serde(rename = "kappa")]
    curvature: f64,
    dim: usize,
}

#[derive(Deserialize)]
struct RawSpace {
    kappa: f64,
    dim: usize,
}

impl TryFrom<RawSpace> for ModelSpace {
    type Error = Error;
    fn try_from(raw: RawSpace) -> Result<Self> {
        ModelSpace::new(raw.kappa, raw.dim)
    }
}

impl ModelSpace {
    pub fn new(curvature: f64, dim: usize) -> Result<Self> {
        if !curvature.is_finite() {
            return Err(Error::InvalidSpace(format!(
                "curvature {curvature} is not finite"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        Ok(Self { curvature, dim })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(0.0, dim)
    }

    /// Hyperbolic space of curvature −1 on the unit hyperboloid.
    pub fn hyperbolic(dim: usize) -> Result<Self> {
        Self::new(-1.0, dim)
    }

    pub fn sphere(dim: usize) -> Result<Self> {
        Self::new(1.0, dim)
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn geometry(&self) -> Geometry {
        if self.curvature < 0.0 {
            Geometry::Hyperbolic
        } else if self.curvature > 0.0 {
            Geometry::Spherical
        } else {
            Geometry::Euclidean
        }
    }

    /// `D_κ`: `π/√κ` for κ > 0, `+∞` otherwise.
    pub fn d_kappa(&self) -> f64 {
        if self.curvature > 0.0 {
            std::f64::consts::PI / self.curvature.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Number of stored coordinates: `n` for κ = 0, `n + 1` otherwise.
    pub fn ambient_len(&self) -> usize {
        match self.geometry() {
            Geometry::Euclidean => self.dim,
            _ => self.dim + 1,
        }
    }

    /// Distance scale `1/√|κ|` (1 in the flat case).
    fn scale(&self) -> f64 {
        if self.curvature == 0.0 {
            1.0
        } else {
            1.0 / self.curvature.abs().sqrt()
        }
    }

    /// Origin of the flat model, `(1, 0, …, 0)` for the curved ones.
    pub fn base_point(&self) -> Point {
        let mut coords = vec![0.0; self.ambient_len()];
        if self.geometry() != Geometry::Euclidean {
            coords[0] = 1.0;
        }
        Point { space: *self, coords }
    }

    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        Point::new(*self, coords)
    }

    /// Hyperboloid point with the given spatial coordinates; `u₀` is solved
    /// from the constraint. In the flat case the coordinates are taken as is.
    pub fn from_spatial(&self, spatial: &[f64]) -> Result<Point> {
        if spatial.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: spatial.len(),
            });
        }
        match self.geometry() {
            Geometry::Euclidean => Ok(Point {
                space: *self,
                coords: spatial.to_vec(),
            }),
            Geometry::Hyperbolic => {
                let mut coords = Vec::with_capacity(self.dim + 1);
                coords.push((1.0 + dot(spatial, spatial)).sqrt());
                coords.extend_from_slice(spatial);
                Ok(Point { space: *self, coords })
            }
            Geometry::Spherical => Err(Error::UnsupportedSpace(
                "spatial parameterization is only defined for kappa <= 0".into(),
            )),
        }
    }

    fn check(&self, p: &Point) -> Result<()> {
        if p.space != *self {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// Geodesic distance, scaled by `1/√|κ|` on the curved models.
    pub fn dist(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.unit_dist(&x.coords, &y.coords)? * self.scale())
    }

    /// Distance on the unit model (κ = ±1) or Euclidean distance.
    ///
    /// Uses the chord form `2·asinh(‖x−y‖_L/2)` (resp. `2·asin(‖x−y‖/2)`),
    /// which is accurate for nearby points where `arcosh(−⟨x,y⟩_L)` loses
    /// half of the significant digits.
    fn unit_dist(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self.geometry() {
            Geometry::Euclidean => Ok(norm(&diff(x, y))),
            Geometry::Hyperbolic => {
                let arg = -lorentz(x, y);
                if arg < 1.0 - DOMAIN_CLAMP {
                    return Err(Error::NumericDomain(format!("arcosh argument {arg} < 1")));
                }
                let d = diff(x, y);
                let chord = lorentz(&d, &d).max(0.0).sqrt();
                Ok(2.0 * (chord / 2.0).asinh())
            }
            Geometry::Spherical => {
                let arg = dot(x, y);
                if arg.abs() > 1.0 + DOMAIN_CLAMP {
                    return Err(Error::NumericDomain(format!(
                        "arccos argument {arg} outside [-1, 1]"
                    )));
                }
                let chord = norm(&diff(x, y));
                Ok(2.0 * (chord / 2.0).min(1.0).asin())
            }
        }
    }

    /// `(1−t)x ⊕ ty`: the point of `[x, y]` at distance `t·d(x, y)` from `x`.
    pub fn combine(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        self.check(x)?;
        self.check(y)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(t));
        }
        if t == 0.0 || x.coords == y.coords {
            return Ok(x.clone());
        }
        if t == 1.0 {
            return Ok(y.clone());
        }
        match self.geometry() {
            Geometry::Euclidean => {
                let coords = x
                    .coords
                    .iter()
                    .zip(&y.coords)
                    .map(|(a, b)| a + t * (b - a))
                    .collect();
                Ok(Point { space: *self, coords })
            }
            _ => {
                let v = self.unit_log(&x.coords, &y.coords)?;
                let scaled: Vec<f64> = v.iter().map(|c| c * t).collect();
                self.unit_exp(&x.coords, &scaled)
            }
        }
    }

    fn unit_log(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let d = self.unit_dist(x, y)?;
        if d == 0.0 {
            return Ok(vec![0.0; x.len()]);
        }
        match self.geometry() {
            Geometry::Euclidean => Ok(diff(y, x)),
            Geometry::Hyperbolic => {
                // y + ⟨x,y⟩_L x is Minkowski-orthogonal to x with length sinh d.
                let ip = lorentz(x, y);
                let mut w: Vec<f64> = y.iter().zip(x).map(|(b, a)| b + ip * a).collect();
                let corr = lorentz(x, &w);
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi += corr * xi;
                }
                let len = lorentz(&w, &w).max(0.0).sqrt();
                if len == 0.0 {
                    return Ok(vec![0.0; x.len()]);
                }
                Ok(w.into_iter().map(|c| c * d / len).collect())
            }
            Geometry::Spherical => {
                if d >= std::f64::consts::PI - DOMAIN_CLAMP {
                    return Err(Error::NonUniqueGeodesic {
                        distance: d * self.scale(),
                        limit: self.d_kappa(),
                    });
                }
                let ip = dot(x, y);
                let mut w: Vec<f64> = y.iter().zip(x).map(|(b, a)| b - ip * a).collect();
                let corr = dot(x, &w);
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi -= corr * xi;
                }
                let len = norm(&w);
                if len == 0.0 {
                    return Ok(vec![0.0; x.len()]);
                }
                Ok(w.into_iter().map(|c| c * d / len).collect())
            }
        }
    }

    fn unit_exp(&self, x: &[f64], v: &[f64]) -> Result<Point> {
        let coords = match self.geometry() {
            Geometry::Euclidean => x.iter().zip(v).map(|(a, b)| a + b).collect(),
            Geometry::Hyperbolic => {
                let n = lorentz(v, v).max(0.0).sqrt();
                if n == 0.0 {
                    x.to_vec()
                } else {
                    let (c, s) = (n.cosh(), n.sinh() / n);
                    x.iter().zip(v).map(|(a, b)| c * a + s * b).collect()
                }
            }
            Geometry::Spherical => {
                let n = norm(v);
                if n == 0.0 {
                    x.to_vec()
                } else {
                    let (c, s) = (n.cos(), n.sin() / n);
                    x.iter().zip(v).map(|(a, b)| c * a + s * b).collect()
                }
            }
        };
        Point::renormalized(*self, coords)
    }

    /// Exponential map at the base of `v`.
    pub fn exp_map(&self, v: &TangentVector) -> Result<Point> {
        self.check(&v.base)?;
        self.unit_exp(&v.base.coords, &v.vec)
    }

    /// Logarithm map: the tangent vector at `x` pointing to `y` whose model
    /// norm is `d(x, y)`. Coincident points give the zero vector.
    pub fn log_map(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        self.check(x)?;
        self.check(y)?;
        let vec = self.unit_log(&x.coords, &y.coords)?;
        Ok(TangentVector { base: x.clone(), vec })
    }

    /// Length of a tangent vector in the metric of this space.
    pub fn tangent_norm(&self, v: &TangentVector) -> f64 {
        self.tangent_inner(v, v).max(0.0).sqrt()
    }

    /// Metric inner product of two tangent vectors at the same base.
    pub fn tangent_inner(&self, v: &TangentVector, w: &TangentVector) -> f64 {
        let raw = match self.geometry() {
            Geometry::Hyperbolic => lorentz(&v.vec, &w.vec),
            _ => dot(&v.vec, &w.vec),
        };
        raw * self.scale() * self.scale()
    }

    /// Project an ambient vector onto the tangent space at `base`.
    pub fn project_tangent(&self, base: &Point, ambient: Vec<f64>) -> Result<TangentVector> {
        self.check(base)?;
        if ambient.len() != base.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: base.coords.len(),
                found: ambient.len(),
            });
        }
        let b = &base.coords;
        let vec = match self.geometry() {
            Geometry::Euclidean => ambient,
            Geometry::Hyperbolic => {
                let ip = lorentz(b, &ambient);
                ambient.iter().zip(b).map(|(a, x)| a + ip * x).collect()
            }
            Geometry::Spherical => {
                let ip = dot(b, &ambient);
                ambient.iter().zip(b).map(|(a, x)| a - ip * x).collect()
            }
        };
        Ok(TangentVector {
            base: base.clone(),
            vec,
        })
    }
}

/// A coordinate vector satisfying the model constraint of its space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct Point {
    space: ModelSpace,
    coords: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPoint {
    space: ModelSpace,
    coords: Vec<f64>,
}

impl TryFrom<RawPoint> for Point {
    type Error = Error;
    fn try_from(raw: RawPoint) -> Result<Self> {
        Point::new(raw.space, raw.coords)
    }
}

impl Point {
    /// Validates `coords` against the model constraint (relative tolerance
    /// 1e−9) and renormalizes them so the constraint holds to rounding.
    pub fn new(space: ModelSpace, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != space.ambient_len() {
            return Err(Error::DimensionMismatch {
                expected: space.ambient_len(),
                found: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint { residual: f64::NAN });
        }
        let diag = validate_point(&space, &coords);
        let scale = coords.iter().map(|c| c * c).sum::<f64>().max(1.0);
        if diag.residual > ADMIT_TOL * scale || !diag.orientation_ok {
            return Err(Error::InvalidPoint {
                residual: diag.residual,
            });
        }
        if diag.pass {
            return Ok(Self { space, coords });
        }
        Self::renormalized(space, coords)
    }

    /// Rescale onto the model: divide by `√(−⟨u,u⟩_L)` on the hyperboloid,
    /// by the Euclidean norm on the sphere.
    fn renormalized(space: ModelSpace, mut coords: Vec<f64>) -> Result<Self> {
        match space.geometry() {
            Geometry::Euclidean => {}
            Geometry::Hyperbolic => {
                let q = -lorentz(&coords, &coords);
                if !(q > 0.0) || coords[0] <= 0.0 {
                    return Err(Error::InvalidPoint {
                        residual: (q - 1.0).abs(),
                    });
                }
                let s = q.sqrt();
                coords.iter_mut().for_each(|c| *c /= s);
            }
            Geometry::Spherical => {
                let n = norm(&coords);
                if !(n > 0.0) {
                    return Err(Error::InvalidPoint { residual: 1.0 });
                }
                coords.iter_mut().for_each(|c| *c /= n);
            }
        }
        Ok(Self { space, coords })
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn validate(&self) -> PointDiagnostics {
        validate_point(&self.space, &self.coords)
    }
}

/// Tangent vector in ambient coordinates of the unit model.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: Point,
    vec: Vec<f64>,
}

impl TangentVector {
    /// Checks orthogonality to the base (Minkowski on the hyperboloid,
    /// Euclidean on the sphere) within 1e−10.
    pub fn new(base: Point, vec: Vec<f64>) -> Result<Self> {
        if vec.len() != base.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: base.coords.len(),
                found: vec.len(),
            });
        }
        let ip = match base.space.geometry() {
            Geometry::Euclidean => 0.0,
            Geometry::Hyperbolic => lorentz(&base.coords, &vec),
            Geometry::Spherical => dot(&base.coords, &vec),
        };
        let scale = norm(&base.coords).max(1.0) * norm(&vec).max(1.0);
        if ip.abs() > 1e-10 * scale {
            return Err(Error::Domain(format!(
                "vector is not tangent at its base (inner product {ip:e})"
            )));
        }
        Ok(Self { base, vec })
    }

    pub fn zero(base: Point) -> Self {
        let vec = vec![0.0; base.coords.len()];
        Self { base, vec }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn vec(&self) -> &[f64] {
        &self.vec
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            base: self.base.clone(),
            vec: self.vec.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s·other`; both vectors must share the base.
    pub fn add_scaled(&self, other: &TangentVector, s: f64) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::Domain("tangent vectors at different bases".into()));
        }
        Ok(Self {
            base: self.base.clone(),
            vec: self.vec.iter().zip(&other.vec).map(|(a, b)| a + s * b).collect(),
        })
    }
}

/// Constraint residual of a coordinate vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointDiagnostics {
    /// `|⟨u,u⟩_L + 1|`, `|‖u‖ − 1|`, or 0 in the flat case.
    pub residual: f64,
    /// `u₀ > 0` on the hyperboloid; always true elsewhere.
    pub orientation_ok: bool,
    pub pass: bool,
}

/// Report how far `coords` is from the model constraint. The pass threshold
/// is [`CONSTRAINT_TOL`] relative to `max(1, ‖u‖²)`.
pub fn validate_point(space: &ModelSpace, coords: &[f64]) -> PointDiagnostics {
    if coords.len() != space.ambient_len() {
        return PointDiagnostics {
            residual: f64::INFINITY,
            orientation_ok: false,
            pass: false,
        };
    }
    let (residual, orientation_ok) = match space.geometry() {
        Geometry::Euclidean => (0.0, true),
        Geometry::Hyperbolic => ((lorentz(coords, coords) + 1.0).abs(), coords[0] > 0.0),
        Geometry::Spherical => ((norm(coords) - 1.0).abs(), true),
    };
    let scale = dot(coords, coords).max(1.0);
    PointDiagnostics {
        residual,
        orientation_ok,
        pass: orientation_ok && residual <= CONSTRAINT_TOL * scale,
    }
}

/// A uniquely geodesic space in which the iteration drivers operate.
pub trait Space {
    type Point: Clone + std::fmt::Debug;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> Result<f64>;

    /// `(1−t)x ⊕ ty`.
    fn combine(&self, x: &Self::Point, y: &Self::Point, t: f64) -> Result<Self::Point>;
}

impl Space for ModelSpace {
    type Point = Point;

    fn dist(&self, x: &Point, y: &Point) -> Result<f64> {
        ModelSpace::dist(self, x, y)
    }

    fn combine(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        ModelSpace::combine(self, x, y, t)
    }
}
