//! Jet-constrained polynomial path fitting.

pub mod approx;
pub mod curve;
pub mod hermite;

pub use approx::{approx_fit, reverify_margin, FitOptions, FitResult, Membership, JET_TOL};
pub use curve::{ChebSeries, Curve, FlatTerm, LocalPoly, NewtonPoly, PiecewisePath};
pub use hermite::{hermite_fit, JetSpec};
