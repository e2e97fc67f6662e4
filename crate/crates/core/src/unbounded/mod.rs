//! Maps onto `R^d` and onto the closed ball from non-compact or
//! lower-dimensional sets, and separating polynomials.

pub mod chain;
pub mod separation;
pub mod tangent;

pub use chain::{f_ell, inversion, norm_flatten, p1, p2, p3, shear, HalfspaceChain};
pub use separation::{separate_sets, separation_poly, Separation, SeparationOptions};
pub use tangent::{certify_tangent_cover, tangent_cover, tangent_projection};
