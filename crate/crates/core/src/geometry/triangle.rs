use super::{ModelSpace, Point};
use crate::error::{Error, Result};

const TRIANGLE_TOL: f64 = 1e-12;

/// Planar triangle with prescribed side lengths.
///
/// Vertices are `v₀ = (0,0)`, `v₁ = (a,0)` and `v₂` in the upper half plane,
/// with `|v₀v₁| = a`, `|v₀v₂| = b`, `|v₁v₂| = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonTriangle {
    pub vertices: [[f64; 2]; 3],
    pub sides: [f64; 3],
}

/// A side of a triangle, named by its endpoint indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    V0V1,
    V0V2,
    V1V2,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::V0V1, Side::V0V2, Side::V1V2];

    fn endpoints(self) -> (usize, usize) {
        match self {
            Side::V0V1 => (0, 1),
            Side::V0V2 => (0, 2),
            Side::V1V2 => (1, 2),
        }
    }
}

pub fn comparison_triangle(a: f64, b: f64, c: f64) -> Result<ComparisonTriangle> {
    let ok = [a, b, c].iter().all(|s| s.is_finite() && *s >= 0.0)
        && a <= b + c + TRIANGLE_TOL
        && b <= a + c + TRIANGLE_TOL
        && c <= a + b + TRIANGLE_TOL;
    if !ok {
        return Err(Error::InvalidTriangle(a, b, c));
    }
    let third = if a == 0.0 {
        [b, 0.0]
    } else {
        let x = 0.5 * (a + (b - c) * (b + c) / a);
        [x, 2.0 * area(a, b, c) / a]
    };
    Ok(ComparisonTriangle {
        vertices: [[0.0, 0.0], [a, 0.0], third],
        sides: [a, b, c],
    })
}

/// Heron's formula in Kahan's cancellation-free arrangement.
fn area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [p, q, r] = s;
    let prod = (p + (q + r)) * (r - (p - q)) * (r + (p - q)) * (p + (q - r));
    0.25 * prod.max(0.0).sqrt()
}

impl ComparisonTriangle {
    /// Point at fraction `t` from the first endpoint of `side`.
    pub fn point_on(&self, side: Side, t: f64) -> [f64; 2] {
        let (i, j) = side.endpoints();
        let (p, q) = (self.vertices[i], self.vertices[j]);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    }
}

fn planar_dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// `d(x, y) − d̄(x̄, ȳ)` for `x` on `side_x` at `t_x` and `y` on `side_y` at
/// `t_y` of the geodesic triangle `vertices`, where bars denote comparison
/// points in the Euclidean plane. The CAT(0) inequality says this is ≤ 0.
pub fn cat_comparison_excess(
    space: &ModelSpace,
    vertices: [&Point; 3],
    (side_x, t_x): (Side, f64),
    (side_y, t_y): (Side, f64),
) -> Result<f64> {
    let a = space.dist(vertices[0], vertices[1])?;
    let b = space.dist(vertices[0], vertices[2])?;
    let c = space.dist(vertices[1], vertices[2])?;
    let tri = comparison_triangle(a, b, c)?;
    let on = |side: Side, t: f64| {
        let (i, j) = side.endpoints();
        space.combine(vertices[i], vertices[j], t)
    };
    let x = on(side_x, t_x)?;
    let y = on(side_y, t_y)?;
    let bar = planar_dist(tri.point_on(side_x, t_x), tri.point_on(side_y, t_y));
    Ok(space.dist(&x, &y)? - bar)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_sides(t: &ComparisonTriangle) {
        let v = t.vertices;
        assert!((planar_dist(v[0], v[1]) - t.sides[0]).abs() < 1e-10);
        assert!((planar_dist(v[0], v[2]) - t.sides[1]).abs() < 1e-10);
        assert!((planar_dist(v[1], v[2]) - t.sides[2]).abs() < 1e-10);
    }

    #[test]
    fn right_triangle() {
        let t = comparison_triangle(3.0, 4.0, 5.0).unwrap();
        assert_sides(&t);
        assert!(t.vertices[2][1] > 0.0);
        assert_eq!(t.vertices[2], [0.0, 4.0]);
    }

    #[test]
    fn degenerate_triangle() {
        let t = comparison_triangle(1.0, 1.0, 0.0).unwrap();
        assert_sides(&t);
        assert_eq!(t.vertices[1], t.vertices[2]);
        let z = comparison_triangle(0.0, 2.0, 2.0).unwrap();
        assert_sides(&z);
    }

    #[test]
    fn equilateral() {
        let t = comparison_triangle(2.0, 2.0, 2.0).unwrap();
        assert_sides(&t);
        assert!((t.vertices[2][0] - 1.0).abs() < 1e-15);
        assert!((t.vertices[2][1] - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sides() {
        assert!(matches!(
            comparison_triangle(1.0, 1.0, 3.0),
            Err(Error::InvalidTriangle(..))
        ));
        assert!(comparison_triangle(-1.0, 1.0, 1.0).is_err());
        // within tolerance of degenerate
        assert!(comparison_triangle(1.0, 1.0, 2.0 + 1e-13).is_ok());
    }

    #[test]
    fn flat_triangles_have_zero_excess() {
        let e = ModelSpace::euclidean(2).unwrap();
        let p = e.point(vec![0.3, -1.0]).unwrap();
        let q = e.point(vec![2.0, 0.5]).unwrap();
        let r = e.point(vec![-0.4, 1.7]).unwrap();
        let ex = cat_comparison_excess(&e, [&p, &q, &r], (Side::V0V1, 0.3), (Side::V1V2, 0.8)).unwrap();
        assert!(ex.abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_triangles_are_thin() {
        let h = ModelSpace::hyperbolic(2).unwrap();
        let p = h.from_spatial(&[0.0, 0.0]).unwrap();
        let q = h.from_spatial(&[2.0, 0.0]).unwrap();
        let r = h.from_spatial(&[0.0, 2.0]).unwrap();
        let ex = cat_comparison_excess(&h, [&p, &q, &r], (Side::V0V1, 0.5), (Side::V0V2, 0.5)).unwrap();
        assert!(ex < -1e-3);
    }
}
