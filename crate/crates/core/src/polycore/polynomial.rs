//! Sparse multivariate polynomials with real coefficients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Term {
    exp: Vec<u32>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPolynomial {
    dim: usize,
    terms: Vec<Term>,
}

/// `sum coef * x^exp` in `dim` variables. Terms are kept sorted by exponent
/// vector, merged, and free of exact zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolynomial", into = "RawPolynomial")]
pub struct Polynomial {
    dim: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl TryFrom<RawPolynomial> for Polynomial {
    type Error = Error;
    fn try_from(raw: RawPolynomial) -> Result<Self> {
        Polynomial::new(raw.dim, raw.terms.into_iter().map(|t| (t.exp, t.coef)))
    }
}

impl From<Polynomial> for RawPolynomial {
    fn from(p: Polynomial) -> Self {
        RawPolynomial {
            dim: p.dim,
            terms: p
                .terms
                .into_iter()
                .map(|(exp, coef)| Term { exp, coef })
                .collect(),
        }
    }
}

impl Polynomial {
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("polynomial dimension must be positive".into()));
        }
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (exp, coef) in terms {
            if exp.len() != dim {
                return Err(Error::dim("polynomial exponent", dim, exp.len()));
            }
            if !coef.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite coefficient {coef}")));
            }
            *map.entry(exp).or_insert(0.0) += coef;
        }
        Ok(Self::from_map(dim, map))
    }

    fn from_map(dim: usize, map: BTreeMap<Vec<u32>, f64>) -> Self {
        Polynomial {
            dim,
            terms: map.into_iter().filter(|(_, c)| *c != 0.0).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: vec![] }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::from_map(dim, BTreeMap::from([(vec![0; dim], c)]))
    }

    /// The coordinate function `x_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Polynomial {
            dim,
            terms: vec![(e, 1.0)],
        }
    }

    /// `a . x + b`.
    pub fn affine(coeffs: &[f64], constant: f64) -> Self {
        let dim = coeffs.len();
        let mut map = BTreeMap::new();
        map.insert(vec![0; dim], constant);
        for (i, a) in coeffs.iter().enumerate() {
            let mut e = vec![0; dim];
            e[i] = 1;
            map.insert(e, *a);
        }
        Self::from_map(dim, map)
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let map = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (vec![k as u32], *c))
            .collect();
        Self::from_map(1, map)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of the monomial `x^exp` (zero when absent).
    pub fn coefficient(&self, exp: &[u32]) -> f64 {
        self.terms
            .binary_search_by(|(e, _)| e.as_slice().cmp(exp))
            .map(|i| self.terms[i].1)
            .unwrap_or(0.0)
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.abs()).sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut s = 0.0;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (xi, ei) in x.iter().zip(e) {
                if *ei > 0 {
                    m *= f64::powi(*xi, *ei as i32);
                }
            }
            s += m;
        }
        s
    }

    pub fn try_eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::dim("polynomial argument", self.dim, x.len()));
        }
        Ok(self.eval(x))
    }

    /// Evaluation over any [`Scalar`], sharing a power table per variable.
    pub fn eval_generic<S: Scalar>(&self, x: &[S]) -> S {
        let zero = x[0].lift(0.0);
        if self.terms.is_empty() {
            return zero;
        }
        let mut max_e = vec![0u32; self.dim];
        for (e, _) in &self.terms {
            for (m, ei) in max_e.iter_mut().zip(e) {
                *m = (*m).max(*ei);
            }
        }
        let table: Vec<Vec<S>> = x
            .iter()
            .zip(&max_e)
            .map(|(xi, m)| {
                let mut row = Vec::with_capacity(*m as usize + 1);
                row.push(xi.lift(1.0));
                for k in 1..=*m as usize {
                    let next = row[k - 1].mul(xi);
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = zero;
        for (e, c) in &self.terms {
            let mut m: Option<S> = None;
            for (i, ei) in e.iter().enumerate() {
                if *ei > 0 {
                    let f = &table[i][*ei as usize];
                    m = Some(match m {
                        None => f.clone(),
                        Some(v) => v.mul(f),
                    });
                }
            }
            let term = match m {
                None => x[0].lift(*c),
                Some(v) => v.scale(*c),
            };
            acc = acc.add(&term);
        }
        acc
    }

    pub fn add_poly(&self, other: &Self) -> Self {
        let mut map: BTreeMap<Vec<u32>, f64> = self.terms.iter().cloned().collect();
        for (e, c) in &other.terms {
            *map.entry(e.clone()).or_insert(0.0) += c;
        }
        Self::from_map(self.dim, map)
    }

    pub fn scale_poly(&self, c: f64) -> Self {
        if c == 0.0 {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul_poly(&self, other: &Self) -> Self {
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *map.entry(e).or_insert(0.0) += c1 * c2;
            }
        }
        Self::from_map(self.dim, map)
    }

    /// Partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let map = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, c * e[i] as f64)
            })
            .collect();
        Self::from_map(self.dim, map)
    }
}

impl Scalar for Polynomial {
    fn lift(&self, c: f64) -> Self {
        Polynomial::constant(self.dim, c)
    }
    fn add(&self, other: &Self) -> Self {
        self.add_poly(other)
    }
    fn sub(&self, other: &Self) -> Self {
        self.add_poly(&other.scale_poly(-1.0))
    }
    fn mul(&self, other: &Self) -> Self {
        self.mul_poly(other)
    }
    fn scale(&self, c: f64) -> Self {
        self.scale_poly(c)
    }
    fn recip(&self) -> Result<Self> {
        Err(Error::NonPolynomial("reciprocal"))
    }
    fn root(&self, _p: u32) -> Result<Self> {
        Err(Error::NonPolynomial("root"))
    }
    fn value(&self) -> f64 {
        self.coefficient(&vec![0; self.dim])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_merges_and_drops_zeros() {
        let p = Polynomial::new(2, [(vec![1, 0], 2.0), (vec![1, 0], -2.0), (vec![0, 1], 3.0)])
            .unwrap();
        assert_eq!(p.terms(), &[(vec![0, 1], 3.0)]);
        assert!(Polynomial::new(2, [(vec![1], 1.0)]).is_err());
    }

    #[test]
    fn binomial_square() {
        let t = Polynomial::variable(1, 0);
        let p = t.sub(&t.lift(8.0)).powi(2);
        assert_eq!(p, Polynomial::univariate(&[64.0, -16.0, 1.0]));
    }

    #[test]
    fn generic_matches_plain_eval() {
        let p = Polynomial::new(2, [(vec![2, 1], 1.5), (vec![0, 3], -0.5), (vec![0, 0], 2.0)])
            .unwrap();
        let x = [0.7, -1.3];
        assert!((p.eval(&x) - p.eval_generic(&x)).abs() < 1e-14);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.partial(0).coefficient(&[1, 1]), 3.0);
    }

    #[test]
    fn json_round_trip() {
        let p = Polynomial::new(2, [(vec![2, 1], 0.1), (vec![0, 3], -1.0 / 3.0)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
