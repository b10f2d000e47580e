//! Fixed-point iterations on CAT(0) model spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: model spaces `M_κⁿ` (flat, spherical, hyperboloid),
//!   distances, geodesic combination, exp/log maps, comparison triangles.
//! - [`operators`]: nonexpansive maps and contractions, with a sampled
//!   Lipschitz checker.
//! - [`iteration`]: step schedules and the Picard, Krasnosel'skii–Mann,
//!   Halpern and viscosity drivers.
//! - [`rates`]: asymptotic-regularity bounds and checkers for traces.
//! - [`optimizer`]: proximal resolvents, the anchored Halpern resolvent
//!   iteration, a Riemannian gradient baseline and the Fréchet mean problem.
//! - [`verify`]: bundled property suites used by the command line runner.

pub mod error;
pub mod export;
pub mod geometry;
pub mod iteration;
pub mod operators;
pub mod optimizer;
pub mod rates;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{ModelSpace, Point, Space, TangentVector};
pub use iteration::{AnchorConvention, IterationConfig, Schedule, Trace};
pub use operators::{Operator, OperatorSpec, SeqSpace, SeqVector};
