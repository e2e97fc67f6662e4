//! Polynomial and Nash map expressions: representation, evaluation,
//! composition, expansion and jets.

pub mod expr;
pub mod jet;
pub mod mapping;
pub mod polynomial;
pub mod scalar;

pub use expr::{compose, eval, expand, MapExpr, Node};
pub use jet::{jet_along, Jet};
pub use mapping::{FnMap, Mapping};
pub use polynomial::Polynomial;
pub use scalar::{Scalar, Taylor, MAX_ORDER, POLE_TOL};
