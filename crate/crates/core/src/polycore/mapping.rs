//! Point-evaluation interface used by the verification engine.

use super::expr::MapExpr;
use crate::error::Result;

/// Anything that maps points of `R^n` to `R^m`.
pub trait Mapping: Sync {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
}

impl Mapping for MapExpr {
    fn domain_dim(&self) -> usize {
        MapExpr::domain_dim(self)
    }
    fn codomain_dim(&self) -> usize {
        MapExpr::codomain_dim(self)
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.eval(x)
    }
}

/// Adapter turning a closure into a [`Mapping`].
pub struct FnMap<F> {
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    pub fn new(domain_dim: usize, codomain_dim: usize, f: F) -> Self {
        FnMap {
            domain_dim,
            codomain_dim,
            f,
        }
    }
}

impl<F> Mapping for FnMap<F>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    fn domain_dim(&self) -> usize {
        self.domain_dim
    }
    fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        (self.f)(x)
    }
}
