//! Compact models, semialgebraic sets, polytopes, samplers and corner
//! complexes.

pub mod catalog;
pub mod corner;
pub mod linear_form;
pub mod polytope;
pub mod region;
pub mod set;

pub use catalog::{cylinder, hypercube, model, prism, solid_simplex, standard_simplex, Model, ModelKind};
pub use corner::{corner_complex, CornerCell, CornerComplex};
pub use linear_form::LinearForm;
pub use polytope::{chebyshev_center, ConvexPolytope};
pub use region::{Region, SampleMode};
pub use set::{BasicClosedSet, Constraint, Relation, SemialgebraicSet, ShapeHint};

/// Membership test, as a free function.
pub fn contains(set: &dyn Region, point: &[f64], tol: f64) -> bool {
    set.contains(point, tol)
}

/// Deterministic sampling, as a free function.
pub fn sample(
    set: &dyn Region,
    n: usize,
    seed: u64,
    mode: SampleMode,
) -> crate::error::Result<Vec<Vec<f64>>> {
    set.sample(n, seed, mode)
}
