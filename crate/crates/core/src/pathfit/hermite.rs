//! Confluent Hermite interpolation from anchor jets.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::curve::{ChebSeries, Curve};
use crate::error::{Error, Result};
use crate::polycore::jet::check_order;
use crate::polycore::{Jet, Scalar, Taylor};

/// Solve residual above which the interpolant is rejected.
pub const SOLVE_TOL: f64 = 1e-6;

/// Jets to match at increasing anchor times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetSpec {
    pub anchors: Vec<f64>,
    pub order: usize,
    pub jets: Vec<Jet>,
}

impl JetSpec {
    pub fn new(anchors: Vec<f64>, order: usize, jets: Vec<Jet>) -> Result<Self> {
        let spec = JetSpec { anchors, order, jets };
        spec.validate()?;
        Ok(spec)
    }

    /// Jets of `curve` at `anchors`.
    pub fn from_curve(curve: &Curve, anchors: &[f64], order: usize) -> Result<Self> {
        let jets = anchors
            .iter()
            .map(|&t| curve.jet(t, order))
            .collect::<Result<Vec<_>>>()?;
        JetSpec::new(anchors.to_vec(), order, jets)
    }

    /// Endpoints 0 and 1 are admitted as anchors.
    pub fn validate(&self) -> Result<()> {
        check_order(self.order)?;
        if self.anchors.is_empty() || self.anchors.len() != self.jets.len() {
            return Err(Error::InvalidInput("one jet per anchor required".into()));
        }
        if self.anchors.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("anchors must increase strictly".into()));
        }
        if self.anchors.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidInput("anchors must lie in [0, 1]".into()));
        }
        let dim = self.jets[0].dim();
        for (t, j) in self.anchors.iter().zip(&self.jets) {
            if j.order != self.order {
                return Err(Error::InvalidInput(format!(
                    "jet at {t} has order {}, expected {}",
                    j.order, self.order
                )));
            }
            if j.dim() != dim {
                return Err(Error::dim("jet", dim, j.dim()));
            }
            if j.t0 != *t {
                return Err(Error::InvalidInput(format!("jet taken at {} listed at {t}", j.t0)));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.jets[0].dim()
    }

    /// Worst relative jet residual of `curve` against the spec.
    pub fn residual(&self, curve: &Curve) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (t, j) in self.anchors.iter().zip(&self.jets) {
            worst = worst.max(curve.jet(*t, self.order)?.residual(j));
        }
        Ok(worst)
    }
}

/// Confluent rows in the Chebyshev basis of `[a, b]`: row `(i, j)` holds
/// the `j`-th Taylor coefficient at anchor `i` of `T_0 .. T_{ncols-1}`.
/// Each row and its right-hand side are scaled by the row's largest entry.
pub(crate) fn confluent_system(spec: &JetSpec, a: f64, b: f64, ncols: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = spec.order;
    let dim = spec.dim();
    let p = spec.anchors.len() * (m + 1);
    let mut rows = DMatrix::zeros(p, ncols);
    let mut rhs = DMatrix::zeros(p, dim);
    for (i, (&t, jet)) in spec.anchors.iter().zip(&spec.jets).enumerate() {
        let x = Taylor::variable(t, m).scale(2.0 / (b - a)).sub(&Taylor::constant((a + b) / (b - a), m));
        let mut prev = Taylor::constant(1.0, m);
        let mut cur = x;
        for k in 0..ncols {
            let tk = if k == 0 { prev } else { cur };
            for j in 0..=m {
                rows[(i * (m + 1) + j, k)] = tk.coeff(j);
            }
            if k >= 1 {
                let next = x.mul(&cur).scale(2.0).sub(&prev);
                prev = cur;
                cur = next;
            }
        }
        let mut fact = 1.0;
        for j in 0..=m {
            if j > 0 {
                fact *= j as f64;
            }
            for c in 0..dim {
                rhs[(i * (m + 1) + j, c)] = jet.derivatives[j][c] / fact;
            }
        }
    }
    for r in 0..p {
        let s = rows.row(r).amax().max(f64::MIN_POSITIVE);
        rows.row_mut(r).scale_mut(1.0 / s);
        rhs.row_mut(r).scale_mut(1.0 / s);
    }
    (rows, rhs)
}

/// Degree `r(m+1) - 1` interpolant: the square confluent system in the
/// Chebyshev basis of `[0, 1]`, column-equilibrated and solved by QR.
pub fn hermite_fit(spec: &JetSpec) -> Result<ChebSeries> {
    spec.validate()?;
    let n = spec.anchors.len() * (spec.order + 1);
    let (mut rows, rhs) = confluent_system(spec, 0.0, 1.0, n);
    let norms: Vec<f64> = (0..n).map(|k| rows.column(k).amax().max(f64::MIN_POSITIVE)).collect();
    for (k, s) in norms.iter().enumerate() {
        rows.column_mut(k).scale_mut(1.0 / s);
    }
    let sol = rows
        .qr()
        .solve(&rhs)
        .ok_or(Error::IllConditioned { residual: f64::INFINITY })?;
    let coeffs: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..sol.ncols()).map(|c| sol[(k, c)] / norms[k]).collect())
        .collect();
    if coeffs.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::IllConditioned { residual: f64::INFINITY });
    }
    let poly = ChebSeries { a: 0.0, b: 1.0, coeffs };
    let residual = spec.residual(&Curve::Chebyshev(poly.clone()))?;
    if residual > SOLVE_TOL {
        return Err(Error::IllConditioned { residual });
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(t0: f64, d: &[&[f64]]) -> Jet {
        Jet::new(t0, d.iter().map(|v| v.to_vec()).collect()).unwrap()
    }

    #[test]
    fn single_anchor_order_zero_is_constant() {
        let spec = JetSpec::new(vec![0.3], 0, vec![jet(0.3, &[&[2.0, -1.0]])]).unwrap();
        let p = Curve::Chebyshev(hermite_fit(&spec).unwrap());
        assert_eq!(p.eval(0.9), vec![2.0, -1.0]);
    }

    #[test]
    fn identity_from_endpoint_jets() {
        let spec = JetSpec::new(
            vec![0.0, 1.0],
            1,
            vec![jet(0.0, &[&[0.0], &[1.0]]), jet(1.0, &[&[1.0], &[1.0]])],
        )
        .unwrap();
        let p = Curve::Chebyshev(hermite_fit(&spec).unwrap());
        for t in [-0.5, 0.25, 0.7, 2.0] {
            assert!((p.eval(t)[0] - t).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let j = jet(0.5, &[&[1.0]]);
        assert!(JetSpec::new(vec![0.5, 0.5], 0, vec![j.clone(), j.clone()]).is_err());
        assert!(JetSpec::new(vec![1.5], 0, vec![jet(1.5, &[&[1.0]])]).is_err());
        assert!(JetSpec::new(vec![0.5], 1, vec![j]).is_err());
    }

    #[test]
    fn nearly_coincident_anchors_are_ill_conditioned() {
        let a = jet(0.5, &[&[0.0], &[1.0], &[0.0], &[0.0]]);
        let b = jet(0.5 + 1e-9, &[&[1.0], &[0.0], &[0.0], &[0.0]]);
        let spec = JetSpec::new(vec![0.5, 0.5 + 1e-9], 3, vec![a, b]).unwrap();
        assert!(matches!(hermite_fit(&spec), Err(Error::IllConditioned { .. })));
    }
}
