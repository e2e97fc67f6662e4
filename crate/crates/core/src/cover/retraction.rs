//! Radial retraction onto the boundary of a simplex from an interior point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add, scale, sub};
use crate::models::LinearForm;
use crate::polycore::Mapping;

/// Distance below which a point counts as the center.
pub const CENTER_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialRetraction {
    pub forms: Vec<LinearForm>,
    pub center: Vec<f64>,
    values_at_center: Vec<f64>,
}

impl RadialRetraction {
    pub fn new(forms: Vec<LinearForm>, center: Vec<f64>) -> Result<Self> {
        let values_at_center: Vec<f64> = forms.iter().map(|f| f.eval(&center)).collect();
        if let Some(i) = values_at_center.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::Precondition(format!("center is not interior to facet {i}")));
        }
        Ok(RadialRetraction { forms, center, values_at_center })
    }

    /// `rho(x) = z + (x - z) / max_i (h_i(z) - h_i(x)) / h_i(z)` and the
    /// active facet (lowest index among ties).
    pub fn retract(&self, x: &[f64]) -> Result<(Vec<f64>, usize)> {
        let dx = sub(x, &self.center);
        let r = crate::linalg::norm(&dx);
        if !(r > CENTER_TOL) {
            return Err(Error::AtCenter);
        }
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, (f, hz)) in self.forms.iter().zip(&self.values_at_center).enumerate() {
            let ratio = (hz - f.eval(x)) / hz;
            if ratio > best.0 {
                best = (ratio, i);
            }
        }
        if !(best.0 > 0.0) {
            return Err(Error::Precondition("retraction needs a bounded simplex".into()));
        }
        Ok((add(&self.center, &scale(&dx, 1.0 / best.0)), best.1))
    }
}

impl Mapping for RadialRetraction {
    fn domain_dim(&self) -> usize {
        self.center.len()
    }
    fn codomain_dim(&self) -> usize {
        self.center.len()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.retract(x).map(|r| r.0)
    }
}

/// Retraction for the facets `h_0..h_n` of an apex simplex.
pub fn radial_retraction(forms: &[LinearForm], center: &[f64]) -> Result<RadialRetraction> {
    RadialRetraction::new(forms.to_vec(), center.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ConvexPolytope, Region, SampleMode};
    use proptest::prelude::*;

    fn triangle() -> (ConvexPolytope, RadialRetraction) {
        let s = ConvexPolytope::simplex(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = radial_retraction(s.facets(), &[0.25, 0.25]).unwrap();
        (s, r)
    }

    /// March along the ray in small steps until leaving, then bisect.
    fn ray_oracle(s: &ConvexPolytope, z: &[f64], x: &[f64]) -> Vec<f64> {
        let d = sub(x, z);
        let inside = |l: f64| s.min_facet_value(&add(z, &scale(&d, l))) >= 0.0;
        let mut hi = 1e-3;
        while inside(hi) {
            hi += 1e-3;
        }
        let mut lo = hi - 1e-3;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        add(z, &scale(&d, lo))
    }

    #[test]
    fn worked_example() {
        let (_, r) = triangle();
        let (y, facet) = r.retract(&[1.0, 1.0]).unwrap();
        assert!((y[0] - 0.5).abs() < 1e-12 && (y[1] - 0.5).abs() < 1e-12);
        let on = r.forms[facet].eval(&y);
        assert!(on.abs() < 1e-12);
        assert!(matches!(r.retract(&[0.25, 0.25]), Err(Error::AtCenter)));
    }

    #[test]
    fn boundary_is_fixed() {
        let (s, r) = triangle();
        for x in s.sample(500, 4, SampleMode::Boundary).unwrap() {
            let y = r.apply(&x).unwrap();
            assert!(crate::linalg::dist(&x, &y) < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn idempotent_and_on_a_facet(x in -3.0..3.0f64, y in -3.0..3.0f64) {
            let (s, r) = triangle();
            prop_assume!(crate::linalg::dist(&[x, y], &r.center) > 1e-6);
            let p = r.apply(&[x, y]).unwrap();
            let pp = r.apply(&p).unwrap();
            prop_assert!(crate::linalg::dist(&p, &pp) < 1e-9);
            prop_assert!(s.facets().iter().any(|f| f.eval(&p).abs() < 1e-9));
            let o = ray_oracle(&s, &r.center, &[x, y]);
            prop_assert!(crate::linalg::dist(&p, &o) < 1e-9);
        }
    }
}
