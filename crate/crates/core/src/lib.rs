//! Mixed-integer convex geometry at desk scale.
//!
//! A mixed-integer convex set is `S = C ∩ (Zⁿ × ℝᵈ)` for a convex body `C`.
//! This crate measures such sets (mixed-integer volume, the sum of fiber
//! volumes over the integer points of the projection), estimates their
//! halfspace depth, constructs a deep point by centroid rounding, evaluates
//! a ball-fiber family on which the depth ratio decays exponentially, and
//! runs seeded property suites for the supporting inequalities.
//!
//! Modules, bottom-up:
//!
//! - [`hull`]: H/V-polytopes, fibers, projection, erosion, Minkowski sums.
//! - [`measure`]: volumes, centroids, lattice points, mixed-integer volume,
//!   level sets and layer-cake integrals.
//! - [`depth`]: captured volumes and depth estimation.
//! - [`centerpoint`]: inscribed cubes, centroid rounding, unimodular transport.
//! - [`necessity`]: the ball-fiber family and its closed forms.
//! - [`harness`]: seeded property suites.
//! - [`cli`]: body spec files and run reports behind the `midepth` binary.

pub mod centerpoint;
pub mod cli;
pub mod depth;
mod error;
pub mod harness;
pub mod hull;
pub mod linalg;
pub mod lp;
pub mod measure;
pub mod necessity;
pub mod rng;

pub use error::{Error, Result};

/// Constraint feasibility tolerance.
pub const TAU_FEAS: f64 = 1e-9;
/// Vertex deduplication tolerance.
pub const TAU_VERTEX: f64 = 1e-7;
/// Tolerance for derived-quantity comparisons.
pub const TAU_NUM: f64 = 1e-6;

/// A point in ℝᵐ.
pub type Point = Vec<f64>;

/// Order-preserving map; data-parallel when the `parallel` feature is on.
pub(crate) fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}
