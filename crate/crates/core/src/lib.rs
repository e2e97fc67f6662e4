//! Explicit polynomial and Nash surjections between compact semialgebraic
//! models, with numerical certification of their images.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::needless_range_loop)]

pub mod cli;
pub mod cover;
pub mod error;
pub mod linalg;
pub mod models;
pub mod pathfit;
pub mod polycore;
pub mod squeeze;
pub mod unbounded;
pub mod verify;

pub use error::{Error, Result};
