//! Agreement of t-jets of two maps on a simplex-times-interval domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::region::{dirichlet, stream_rng};
use crate::polycore::jet::check_order;
use crate::polycore::{MapExpr, Taylor};

/// Jet residual below which two jets count as equal.
pub const JET_EQUAL_TOL: f64 = 1e-7;
/// Number of simplex points tested.
pub const SLICES: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetComparison {
    pub agree: bool,
    pub residual: f64,
    /// Lowest derivative order where some slice disagrees.
    pub first_mismatch: Option<usize>,
    pub slices: usize,
    /// Whether `|F - G| <= |bound(t)|` held near `t0` with `bound`
    /// vanishing to order `k + 1`; `None` when no bound was supplied.
    pub bound_certified: Option<bool>,
}

/// Slice points of the simplex on the first `n - 1` coordinates.
fn slices(n: usize, seed: u64) -> Vec<Vec<f64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut rng = stream_rng(seed, 0);
    let mut out: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    while out.len() < SLICES {
        out.push(dirichlet(&mut rng, n));
    }
    out
}

/// t-derivatives up to `k` of `map(lambda, t)` at `t0`.
fn t_jet(map: &MapExpr, lambda: &[f64], t0: f64, k: usize) -> Result<Vec<Vec<f64>>> {
    let mut x: Vec<Taylor> = lambda.iter().map(|l| Taylor::constant(*l, k)).collect();
    x.push(Taylor::variable(t0, k));
    let v = map.eval_generic(&x)?;
    Ok((0..=k).map(|j| v.iter().map(|s| s.derivative(j)).collect()).collect())
}

/// Compares t-jets to order `k` at `t0` of maps on `Delta x R` (last
/// coordinate is t) across simplex slices; optionally certifies the
/// hypothesis `|F - G| <= |bound(t)|` with `bound` of order `k + 1` at `t0`.
pub fn jet_equal(
    f: &MapExpr,
    g: &MapExpr,
    t0: f64,
    k: usize,
    bound: Option<&MapExpr>,
) -> Result<JetComparison> {
    check_order(k)?;
    if f.domain_dim() != g.domain_dim() || f.codomain_dim() != g.codomain_dim() {
        return Err(Error::dim("jet_equal maps", f.domain_dim(), g.domain_dim()));
    }
    if f.domain_dim() == 0 {
        return Err(Error::InvalidInput("maps need a time coordinate".into()));
    }
    let lambdas = slices(f.domain_dim() - 1, 0x6a65_7473);
    let mut residual: f64 = 0.0;
    let mut first_mismatch: Option<usize> = None;
    for l in &lambdas {
        let jf = t_jet(f, l, t0, k)?;
        let jg = t_jet(g, l, t0, k)?;
        for (order, (a, b)) in jf.iter().zip(&jg).enumerate() {
            for (x, y) in a.iter().zip(b) {
                let r = (x - y).abs() / (1.0 + x.abs().max(y.abs()));
                residual = residual.max(r);
                if r >= JET_EQUAL_TOL {
                    first_mismatch = Some(first_mismatch.map_or(order, |m| m.min(order)));
                }
            }
        }
    }
    let bound_certified = match bound {
        None => None,
        Some(b) => Some(certify_bound(f, g, b, t0, k, &lambdas)?),
    };
    Ok(JetComparison {
        agree: first_mismatch.is_none(),
        residual,
        first_mismatch,
        slices: lambdas.len(),
        bound_certified,
    })
}

fn certify_bound(
    f: &MapExpr,
    g: &MapExpr,
    bound: &MapExpr,
    t0: f64,
    k: usize,
    lambdas: &[Vec<f64>],
) -> Result<bool> {
    if bound.domain_dim() != 1 || bound.codomain_dim() != 1 {
        return Err(Error::dim("jet bound", 1, bound.domain_dim()));
    }
    let v = bound.eval_generic(&[Taylor::variable(t0, k + 1)])?;
    let vanishes = (0..=k).all(|j| v[0].derivative(j).abs() < JET_EQUAL_TOL);
    if !vanishes || v[0].derivative(k + 1).abs() < JET_EQUAL_TOL {
        return Ok(false);
    }
    for i in 1..=50 {
        for sgn in [-1.0, 1.0] {
            let t = t0 + sgn * 0.1 * i as f64 / 50.0;
            let lam = bound.eval(&[t])?[0].abs();
            for l in lambdas {
                let mut x = l.clone();
                x.push(t);
                let diff = crate::linalg::norm(&crate::linalg::sub(&f.eval(&x)?, &g.eval(&x)?));
                if diff > lam * (1.0 + 1e-9) + 1e-15 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::Polynomial;

    /// Scalar map on (lambda_1, lambda_2, t) given by a polynomial in t.
    fn in_t(coeffs: &[f64]) -> MapExpr {
        let p = Polynomial::univariate(coeffs);
        MapExpr::composition(vec![
            MapExpr::polynomial(vec![p]).unwrap(),
            MapExpr::coordinate(3, 2).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn lemma_order_cases() {
        let zero = in_t(&[0.0]);
        let t4 = in_t(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        let t2 = in_t(&[0.0, 0.0, 1.0]);
        let bound = MapExpr::polynomial(vec![Polynomial::univariate(&[0.0, 0.0, 0.0, 0.0, 1.0])]).unwrap();
        let r = jet_equal(&t4, &zero, 0.0, 3, Some(&bound)).unwrap();
        assert!(r.agree);
        assert_eq!(r.bound_certified, Some(true));
        assert!(jet_equal(&t2, &zero, 0.0, 1, None).unwrap().agree);
        let r = jet_equal(&t2, &zero, 0.0, 3, None).unwrap();
        assert!(!r.agree);
        assert_eq!(r.first_mismatch, Some(2));
    }
}
