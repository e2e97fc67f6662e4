//! Affine functions `h(x) = a . x + b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::polycore::Polynomial;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

impl LinearForm {
    pub fn new(coeffs: Vec<f64>, constant: f64) -> Self {
        LinearForm { coeffs, constant }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.coeffs, x) + self.constant
    }

    /// The direction part `h(v) - h(0)`.
    pub fn direction(&self, v: &[f64]) -> f64 {
        dot(&self.coeffs, v)
    }

    /// Rescaled to a unit coefficient vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = norm(&self.coeffs);
        if n <= 1e-300 {
            return Err(Error::Degenerate("linear form with zero coefficients".into()));
        }
        Ok(LinearForm {
            coeffs: self.coeffs.iter().map(|a| a / n).collect(),
            constant: self.constant / n,
        })
    }

    pub fn negated(&self) -> Self {
        LinearForm {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
            constant: -self.constant,
        }
    }

    /// The form vanishing on the hyperplane through `points` (exactly `d`
    /// affinely independent points), unit-normalized and oriented so that
    /// `positive` evaluates positive.
    pub fn through(points: &[Vec<f64>], positive: &[f64]) -> Result<Self> {
        let n = crate::linalg::hyperplane_normal(points)
            .ok_or_else(|| Error::Degenerate("points are affinely dependent".into()))?;
        let f = LinearForm::new(n.clone(), -dot(&n, &points[0]));
        let s = f.eval(positive);
        if s.abs() < 1e-12 {
            return Err(Error::Degenerate("orientation point lies on the hyperplane".into()));
        }
        Ok(if s > 0.0 { f } else { f.negated() })
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::affine(&self.coeffs, self.constant)
    }

    /// Reads a form back from a polynomial of degree at most one.
    pub fn from_polynomial(p: &Polynomial) -> Result<Self> {
        if p.degree() > 1 {
            return Err(Error::InvalidInput("facet polynomial has degree > 1".into()));
        }
        let d = p.dim();
        let coeffs = (0..d)
            .map(|i| {
                let mut e = vec![0; d];
                e[i] = 1;
                p.coefficient(&e)
            })
            .collect();
        Ok(LinearForm::new(coeffs, p.coefficient(&vec![0; d])))
    }
}
