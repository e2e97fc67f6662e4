//! Jets of maps along univariate paths.

use serde::{Deserialize, Serialize};

use super::expr::MapExpr;
use super::scalar::{Taylor, MAX_ORDER};
use crate::error::{Error, Result};

/// Value and derivatives `0..=order` of a path at `t0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub t0: f64,
    pub order: usize,
    pub derivatives: Vec<Vec<f64>>,
}

impl Jet {
    pub fn new(t0: f64, derivatives: Vec<Vec<f64>>) -> Result<Self> {
        let first = derivatives
            .first()
            .ok_or_else(|| Error::InvalidInput("jet without derivatives".into()))?;
        let dim = first.len();
        if let Some(d) = derivatives.iter().find(|d| d.len() != dim) {
            return Err(Error::dim("jet derivative", dim, d.len()));
        }
        Ok(Jet {
            t0,
            order: derivatives.len() - 1,
            derivatives,
        })
    }

    /// Assemble a jet from per-component Taylor series.
    pub fn from_taylor(t0: f64, order: usize, series: &[Taylor]) -> Self {
        let derivatives = (0..=order)
            .map(|k| series.iter().map(|s| s.derivative(k)).collect())
            .collect();
        Jet {
            t0,
            order,
            derivatives,
        }
    }

    pub fn dim(&self) -> usize {
        self.derivatives[0].len()
    }

    /// Largest entrywise difference, relative to `1 + max |entry|`.
    pub fn residual(&self, other: &Jet) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in self.derivatives.iter().zip(&other.derivatives) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs() / (1.0 + x.abs().max(y.abs())));
            }
        }
        if self.order != other.order || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        worst
    }
}

/// Checks the order cap shared by every jet computation.
pub fn check_order(m: usize) -> Result<()> {
    if m > MAX_ORDER {
        Err(Error::OrderTooHigh {
            order: m,
            cap: MAX_ORDER,
        })
    } else {
        Ok(())
    }
}

/// Jet of `map o path` at `t0`, by truncated Taylor arithmetic.
pub fn jet_along(map: &MapExpr, path: &MapExpr, t0: f64, m: usize) -> Result<Jet> {
    check_order(m)?;
    if path.domain_dim() != 1 {
        return Err(Error::dim("path domain", 1, path.domain_dim()));
    }
    if path.codomain_dim() != map.domain_dim() {
        return Err(Error::dim("path codomain", map.domain_dim(), path.codomain_dim()));
    }
    let t = [Taylor::variable(t0, m)];
    let p = path.eval_generic(&t)?;
    let v = map.eval_generic(&p)?;
    Ok(Jet::from_taylor(t0, m, &v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::polynomial::Polynomial;

    #[test]
    fn cubic_path_jet() {
        let (v, u, w) = ([1.0, 2.0], [0.5, 1.0], [0.0, 3.0]);
        let comps = (0..2)
            .map(|k| Polynomial::univariate(&[v[k], 0.0, u[k], w[k]]))
            .collect();
        let path = MapExpr::polynomial(comps).unwrap();
        let jet = jet_along(&MapExpr::identity(2), &path, 0.0, 3).unwrap();
        assert_eq!(jet.derivatives[0], v.to_vec());
        assert_eq!(jet.derivatives[1], vec![0.0, 0.0]);
        assert_eq!(jet.derivatives[2], vec![1.0, 2.0]);
        assert_eq!(jet.derivatives[3], vec![0.0, 18.0]);
    }

    #[test]
    fn order_cap() {
        let p = MapExpr::identity(1);
        assert!(matches!(
            jet_along(&p, &p, 0.0, 9),
            Err(Error::OrderTooHigh { .. })
        ));
    }
}
