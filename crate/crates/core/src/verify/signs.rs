//! Sign profiles of polynomial forms along a path.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::VerificationReport;
use crate::error::{Error, Result};
use crate::pathfit::Curve;
use crate::polycore::{Polynomial, Taylor, MAX_ORDER};

/// Required margin for strict signs.
pub const SIGN_MARGIN: f64 = 1e-12;
/// Taylor coefficients below this count as zero when finding vanishing
/// orders at excluded endpoints.
const VANISH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
    Any,
}

impl Sign {
    fn factor(self) -> Option<f64> {
        match self {
            Sign::Positive => Some(1.0),
            Sign::Negative => Some(-1.0),
            Sign::Any => None,
        }
    }
}

/// A sub-interval with the expected sign of each form on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignInterval {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub include_lo: bool,
    pub include_hi: bool,
    pub expected: Vec<Sign>,
}

impl SignInterval {
    pub fn new(name: &str, lo: f64, hi: f64, include_lo: bool, include_hi: bool, expected: Vec<Sign>) -> Self {
        SignInterval {
            name: name.to_string(),
            lo,
            hi,
            include_lo,
            include_hi,
            expected,
        }
    }

    /// `n` sample times, endpoints included only when closed.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let (a, b) = (self.lo, self.hi);
        match (self.include_lo, self.include_hi) {
            (true, true) => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
            (true, false) => (0..n).map(|k| a + (b - a) * k as f64 / n as f64).collect(),
            (false, true) => (0..n).map(|k| b - (b - a) * k as f64 / n as f64).rev().collect(),
            (false, false) => (0..n).map(|k| a + (b - a) * (k as f64 + 0.5) / n as f64).collect(),
        }
    }
}

/// Order of vanishing of `form o path` at `t0` (0 if it does not vanish).
pub fn vanishing_order(path: &Curve, form: &Polynomial, t0: f64) -> usize {
    let x = path.eval_generic(&Taylor::variable(t0, MAX_ORDER));
    let v = form.eval_generic(&x);
    let scale = 1.0 + v.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    (0..=MAX_ORDER)
        .find(|k| v.coeff(*k).abs() > VANISH_TOL * scale)
        .unwrap_or(0)
}

/// Checks the expected strict signs of every form on every sub-interval.
/// Values are divided by `|t - e|^k` at each open endpoint `e` where the
/// form vanishes to order `k`, so margins measure leading coefficients
/// rather than the distance to the excluded point.
pub fn sign_profile(
    path: &Curve,
    forms: &[Polynomial],
    intervals: &[SignInterval],
    samples: usize,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if let Some(f) = forms.iter().find(|f| f.dim() != path.dim()) {
        return Err(Error::dim("sign form", path.dim(), f.dim()));
    }
    let mut report = VerificationReport::new("sign_profile", 0, 0).tolerance("margin", SIGN_MARGIN);
    let mut min_margin = f64::INFINITY;
    for iv in intervals {
        if iv.expected.len() != forms.len() {
            return Err(Error::dim("expected signs", forms.len(), iv.expected.len()));
        }
        let ts = iv.samples(samples);
        report.samples += ts.len();
        for (fi, (form, sign)) in forms.iter().zip(&iv.expected).enumerate() {
            let Some(s) = sign.factor() else { continue };
            let mut open = Vec::new();
            if !iv.include_lo {
                open.push((iv.lo, vanishing_order(path, form, iv.lo)));
            }
            if !iv.include_hi {
                open.push((iv.hi, vanishing_order(path, form, iv.hi)));
            }
            let (t, m) = ts
                .par_iter()
                .map(|&t| {
                    let raw = s * form.eval(&path.eval(t));
                    let norm = open
                        .iter()
                        .fold(1.0, |acc, (e, k)| acc * (t - e).abs().powi(*k as i32));
                    let m = if raw > 0.0 { raw / norm } else { raw.min(0.0) };
                    (t, m)
                })
                .reduce(|| (f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            report.detail(&format!("{}.form{fi}", iv.name), m);
            if m < min_margin {
                min_margin = m;
                if !(m > SIGN_MARGIN) && !t.is_nan() {
                    report.witness = Some(vec![t, fi as f64]);
                }
            }
        }
    }
    report.detail("min_margin", min_margin);
    report.passed = min_margin > SIGN_MARGIN;
    report.worst_violation = if report.passed { 0.0 } else { SIGN_MARGIN - min_margin };
    Ok(report.timed(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathfit::{LocalPoly, PiecewisePath};

    fn path() -> Curve {
        // (t^3, t^2, 1)
        Curve::Piecewise(
            PiecewisePath::new(
                vec![-1.0, 1.0],
                vec![LocalPoly::new(
                    0.0,
                    vec![vec![0.0, 0.0, 1.0], vec![0.0; 3], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]],
                )
                .unwrap()],
            )
            .unwrap(),
        )
    }

    fn coord(i: usize) -> Polynomial {
        Polynomial::variable(3, i)
    }

    #[test]
    fn cubic_and_quadratic_signs() {
        use Sign::*;
        let ivs = [
            SignInterval::new("left", -0.5, 0.0, true, false, vec![Negative, Positive, Positive]),
            SignInterval::new("right", 0.0, 0.5, false, true, vec![Positive, Positive, Positive]),
        ];
        let r = sign_profile(&path(), &[coord(0), coord(1), coord(2)], &ivs, 1000).unwrap();
        assert!(r.passed, "{:?}", r.details);
        // leading coefficients after normalization
        assert!((r.details["right.form0"] - 1.0).abs() < 1e-12);
        let bad = [SignInterval::new("right", 0.0, 0.5, false, true, vec![Negative, Any, Any])];
        assert!(!sign_profile(&path(), &[coord(0), coord(1), coord(2)], &bad, 100).unwrap().passed);
    }

    #[test]
    fn vanishing_orders() {
        assert_eq!(vanishing_order(&path(), &coord(0), 0.0), 3);
        assert_eq!(vanishing_order(&path(), &coord(1), 0.0), 2);
        assert_eq!(vanishing_order(&path(), &coord(2), 0.0), 0);
    }
}
