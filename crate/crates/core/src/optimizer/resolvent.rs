use super::objective::Objective;
use crate::error::{Error, Result};
use crate::geometry::{Geometry, ModelSpace, Point, TangentVector};
use crate::operators::Operator;

pub const DEFAULT_INNER_TOL: f64 = 1e-10;
pub const DEFAULT_INNER_MAX_ITER: usize = 10_000;
const MAX_HALVINGS: usize = 60;

/// How `J_λ` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inner {
    /// Geodesic placement along `[x, a]`; only for `½ d(·, a)²`.
    ClosedForm,
    /// Riemannian gradient descent on `f(y) + d(x, y)²/(2λ)`.
    Numeric { max_iter: usize, tol: f64 },
}

impl Inner {
    pub fn numeric() -> Self {
        Inner::Numeric {
            max_iter: DEFAULT_INNER_MAX_ITER,
            tol: DEFAULT_INNER_TOL,
        }
    }
}

/// The proximal map `J_λ(x) = argmin_y f(y) + d(x, y)²/(2λ)`.
#[derive(Debug, Clone)]
pub struct ResolventSpec {
    pub objective: Objective,
    pub lambda: f64,
    pub inner: Inner,
}

impl ResolventSpec {
    pub fn new(objective: Objective, lambda: f64, inner: Inner) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(lambda));
        }
        if inner == Inner::ClosedForm && !matches!(objective, Objective::HalfSqDist { .. }) {
            return Err(Error::InvalidObjective(format!(
                "no closed-form resolvent for {}",
                objective.name()
            )));
        }
        if let Inner::Numeric { max_iter, tol } = inner {
            if max_iter == 0 || !(tol > 0.0) {
                return Err(Error::Config(
                    "numeric resolvent needs max_iter > 0 and tol > 0".into(),
                ));
            }
        }
        Ok(Self {
            objective,
            lambda,
            inner,
        })
    }

    pub fn closed_form(anchor: Point, lambda: f64) -> Result<Self> {
        Self::new(Objective::half_sq_dist(anchor), lambda, Inner::ClosedForm)
    }

    pub fn numeric(objective: Objective, lambda: f64) -> Result<Self> {
        Self::new(objective, lambda, Inner::numeric())
    }

    pub fn apply(&self, space: &ModelSpace, x: &Point) -> Result<Point> {
        match (&self.inner, &self.objective) {
            (Inner::ClosedForm, Objective::HalfSqDist { anchor }) => {
                resolvent_closed_form(space, x, anchor, self.lambda)
            }
            (Inner::ClosedForm, _) => unreachable!("checked in ResolventSpec::new"),
            (Inner::Numeric { .. }, _) => resolvent_numeric(space, self, x),
        }
    }
}

impl Operator<ModelSpace> for ResolventSpec {
    fn apply(&self, space: &ModelSpace, x: &Point) -> Result<Point> {
        ResolventSpec::apply(self, space, x)
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }

    fn label(&self) -> String {
        format!("resolvent({})", self.objective.name())
    }
}

pub(crate) fn require_hadamard(space: &ModelSpace) -> Result<()> {
    if space.geometry() == Geometry::Spherical {
        return Err(Error::UnsupportedSpace(format!(
            "curvature {} is positive",
            space.curvature()
        )));
    }
    Ok(())
}

/// `J_λ` for `½ d(·, a)²`: the point at fraction `λ/(1+λ)` from `x` to `a`.
pub fn resolvent_closed_form(space: &ModelSpace, x: &Point, a: &Point, lambda: f64) -> Result<Point> {
    require_hadamard(space)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(lambda));
    }
    space.combine(x, a, lambda / (1.0 + lambda))
}

pub fn resolvent_numeric(space: &ModelSpace, spec: &ResolventSpec, x: &Point) -> Result<Point> {
    require_hadamard(space)?;
    let (max_iter, tol) = match spec.inner {
        Inner::Numeric { max_iter, tol } => (max_iter, tol),
        Inner::ClosedForm => (DEFAULT_INNER_MAX_ITER, DEFAULT_INNER_TOL),
    };
    let lambda = spec.lambda;
    let value = |y: &Point| -> Result<f64> {
        Ok(spec.objective.value(space, y)? + space.dist(x, y)?.powi(2) / (2.0 * lambda))
    };
    let gradient = |y: &Point| -> Result<TangentVector> {
        spec.objective
            .gradient(space, y)?
            .add_scaled(&space.log_map(y, x)?, -1.0 / lambda)
    };
    let step = lambda / (1.0 + lambda);
    descend(space, x.clone(), step, tol, max_iter, value, gradient)
}

/// Riemannian gradient descent `y ← exp_y(−η ∇F(y))` with a fixed trial step
/// `η`, halved until the value decreases.
pub(crate) fn descend<V, G>(
    space: &ModelSpace,
    start: Point,
    step: f64,
    tol: f64,
    max_iter: usize,
    value: V,
    gradient: G,
) -> Result<Point>
where
    V: Fn(&Point) -> Result<f64>,
    G: Fn(&Point) -> Result<TangentVector>,
{
    let mut y = start;
    let mut fy = value(&y)?;
    let mut g = gradient(&y)?;
    let mut gn = space.tangent_norm(&g);
    for _ in 0..max_iter {
        if gn <= tol {
            return Ok(y);
        }
        let mut eta = step;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand = space.exp_map(&g.scaled(-eta))?;
            let fc = value(&cand)?;
            let gc = gradient(&cand)?;
            let gcn = space.tangent_norm(&gc);
            // below rounding level the value stalls; the gradient norm decides
            let flat = fc - fy <= 4.0 * f64::EPSILON * fy.abs().max(1.0);
            if fc < fy || (flat && gcn < gn) {
                accepted = Some((cand, fc, gc, gcn));
                break;
            }
            eta *= 0.5;
        }
        match accepted {
            Some((cand, fc, gc, gcn)) => {
                y = cand;
                fy = fc;
                g = gc;
                gn = gcn;
            }
            None => break,
        }
    }
    if gn <= tol {
        return Ok(y);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        grad_norm: gn,
    })
}
