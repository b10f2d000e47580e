//! Seeded samplers for property checks and experiment setup.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::geometry::{ModelSpace, Point, TangentVector};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly distributed unit tangent direction at `base`.
pub fn unit_tangent<R: Rng>(space: &ModelSpace, base: &Point, rng: &mut R) -> Result<TangentVector> {
    loop {
        let raw: Vec<f64> = (0..base.coords().len())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let v = space.project_tangent(base, raw)?;
        let n = space.tangent_norm(&v);
        if n > 1e-8 {
            return Ok(v.scaled(1.0 / n));
        }
    }
}

/// Random point at distance at most `radius` from `center`.
///
/// The radius is drawn with density ∝ rⁿ⁻¹ in the flat case, which makes the
/// sample uniform in Euclidean balls; curved balls are only approximately
/// uniform, which is irrelevant for the property checks that use it.
pub fn point_in_ball<R: Rng>(space: &ModelSpace, center: &Point, radius: f64, rng: &mut R) -> Result<Point> {
    let dir = unit_tangent(space, center, rng)?;
    let u: f64 = rng.gen();
    let r = radius * u.powf(1.0 / space.dim() as f64);
    space.exp_map(&dir.scaled(r))
}

/// Random point on the sphere of radius `radius` around `center`.
pub fn point_on_sphere<R: Rng>(
    space: &ModelSpace,
    center: &Point,
    radius: f64,
    rng: &mut R,
) -> Result<Point> {
    let dir = unit_tangent(space, center, rng)?;
    space.exp_map(&dir.scaled(radius))
}

/// Endless iterator of seeded point pairs drawn from a metric ball.
pub struct BallPairs {
    space: ModelSpace,
    center: Point,
    radius: f64,
    rng: SeededRng,
}

impl BallPairs {
    pub fn new(space: ModelSpace, center: Point, radius: f64, seed: u64) -> Self {
        Self {
            space,
            center,
            radius,
            rng: seeded(seed),
        }
    }
}

impl Iterator for BallPairs {
    type Item = (Point, Point);

    fn next(&mut self) -> Option<Self::Item> {
        let x = point_in_ball(&self.space, &self.center, self.radius, &mut self.rng).ok()?;
        let y = point_in_ball(&self.space, &self.center, self.radius, &mut self.rng).ok()?;
        Some((x, y))
    }
}
