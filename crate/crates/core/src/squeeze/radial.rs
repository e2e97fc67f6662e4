//! Radial squeeze polynomials `h(t) = t^a ((R^2 - t)/(R^2 - 1))^e` and the
//! maps `g(x) = h(|x|^2) x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycore::{MapExpr, Taylor};

/// How the exponent `e` is tied to `a` and `R^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentRule {
    /// `a (R^2 - 1) = e`, so `h'(1) = 0`.
    Flat,
    /// `(2a + 1)(R^2 - 1) = 2e`, so the radial profile `r h(r^2)` has its
    /// unique maximum `1` at `r = 1`; needs odd `R^2`.
    Balanced,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialSqueeze {
    pub r2: u32,
    pub a: u32,
    pub e: u32,
    pub rule: ExponentRule,
    /// `h` as a map `R -> R`, factored.
    pub h: MapExpr,
}

/// Number of radii used when sampling the radial profile.
pub const PROFILE_SAMPLES: usize = 100_000;

/// Tolerance on the profile maximum.
pub const PROFILE_TOL: f64 = 1e-9;

impl RadialSqueeze {
    pub fn new(r2: u32, rule: ExponentRule) -> Result<Self> {
        if r2 < 2 {
            return Err(Error::InvalidInput(format!("R^2 must be at least 2, got {r2}")));
        }
        let a = 2;
        let e = match rule {
            ExponentRule::Flat => a * (r2 - 1),
            ExponentRule::Balanced => {
                if r2.is_multiple_of(2) {
                    return Err(Error::InvalidInput(format!(
                        "balanced exponents need odd R^2, got {r2}"
                    )));
                }
                (2 * a + 1) * (r2 - 1) / 2
            }
        };
        let t = MapExpr::identity(1);
        let shifted = MapExpr::affine(vec![vec![-1.0]], vec![r2 as f64])?;
        let ratio = MapExpr::scalar_multiple(1.0 / (r2 as f64 - 1.0), shifted)?;
        let h = MapExpr::product(vec![MapExpr::power(t, a), MapExpr::power(ratio, e)])?;
        Ok(RadialSqueeze { r2, a, e, rule, h })
    }

    pub fn eval_h(&self, t: f64) -> f64 {
        self.h.eval(&[t]).expect("h is a polynomial")[0]
    }

    /// `h'(t)` by Taylor arithmetic.
    pub fn h_derivative(&self, t: f64) -> f64 {
        let s = self.h.eval_generic(&[Taylor::variable(t, 1)]).expect("h is a polynomial");
        s[0].derivative(1)
    }

    /// The radial profile `r h(r^2)`, i.e. `|g(x)|` at `|x| = r`.
    pub fn profile(&self, r: f64) -> f64 {
        r * self.eval_h(r * r)
    }

    pub fn radius(&self) -> f64 {
        (self.r2 as f64).sqrt()
    }

    /// Sampled maximum of the profile on `[0, R]`: (value, radius).
    pub fn profile_max(&self) -> (f64, f64) {
        let rmax = self.radius();
        (0..=PROFILE_SAMPLES)
            .map(|k| {
                let r = rmax * k as f64 / PROFILE_SAMPLES as f64;
                (self.profile(r), r)
            })
            .fold((f64::NEG_INFINITY, 0.0), |acc, v| if v.0 > acc.0 { v } else { acc })
    }

    /// Sampled range of `h` on `[0, R^2]` over `n + 1` points.
    pub fn h_range(&self, n: usize) -> (f64, f64) {
        let r2 = self.r2 as f64;
        (0..=n)
            .map(|k| self.eval_h(r2 * k as f64 / n as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// `g(x) = h(|x|^2) x` on `R^d`.
    pub fn map(&self, d: usize) -> Result<MapExpr> {
        let x = MapExpr::identity(d);
        let hn = crate::polycore::compose(&self.h, &MapExpr::norm_square(x.clone()))?;
        MapExpr::product(vec![hn, x])
    }
}

/// The squeeze polynomial with `a = 2`, `e = 2(R^2 - 1)`.
pub fn radial_poly(r2: u32) -> Result<RadialSqueeze> {
    RadialSqueeze::new(r2, ExponentRule::Flat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_values_are_exact() {
        for r2 in [2, 8, 18] {
            let h = radial_poly(r2).unwrap();
            assert_eq!(h.eval_h(1.0), 1.0);
            assert_eq!(h.eval_h(0.0), 0.0);
            assert_eq!(h.eval_h(r2 as f64), 0.0);
            assert!(h.h_derivative(1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn r2_two_is_the_quartic() {
        // h(t) = t^2 (t - 2)^2 with h' = 2t(t-2)(2t-2)
        let h = radial_poly(2).unwrap();
        for k in 0..=20 {
            let t = 2.0 * k as f64 / 20.0;
            assert!((h.eval_h(t) - t * t * (t - 2.0) * (t - 2.0)).abs() < 1e-14);
            let dh = 2.0 * t * (t - 2.0) * (2.0 * t - 2.0);
            assert!((h.h_derivative(t) - dh).abs() < 1e-12);
        }
        let (lo, hi) = h.h_range(10_000);
        assert!(lo >= 0.0 && (hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn flat_profile_overshoots_just_outside_the_unit_sphere() {
        // d/dr (r h(r^2)) = h(1) + 2 h'(1) = 1 at r = 1
        for r2 in [2, 8, 18] {
            let (m, at) = radial_poly(r2).unwrap().profile_max();
            assert!(m > 1.0 + 1e-3 && at > 1.0, "R2={r2}: max {m} at {at}");
        }
    }

    #[test]
    fn balanced_profile_peaks_at_one() {
        for r2 in [3, 9, 19] {
            let s = RadialSqueeze::new(r2, ExponentRule::Balanced).unwrap();
            assert_eq!(s.eval_h(1.0), 1.0);
            let (m, at) = s.profile_max();
            assert!(m <= 1.0 + 1e-12 && (at - 1.0).abs() < 1e-3, "R2={r2}: {m} at {at}");
        }
        assert!(RadialSqueeze::new(8, ExponentRule::Balanced).is_err());
    }

    #[test]
    fn map_is_radial() {
        let g = radial_poly(8).unwrap().map(2).unwrap();
        let y = g.eval(&[0.3, -0.4]).unwrap();
        assert!((y[0] * -0.4 - y[1] * 0.3).abs() < 1e-15);
    }
}
