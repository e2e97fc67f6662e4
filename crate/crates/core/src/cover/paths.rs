//! Apex paths: cubic arcs at both ends joined by a segment.

use serde::{Deserialize, Serialize};

use super::instance::{linear_part, ApexInstance};
use crate::error::{Error, Result};
use crate::linalg::{combine, scale};
use crate::models::LinearForm;
use crate::pathfit::{Curve, LocalPoly, PiecewisePath};
use crate::polycore::{Polynomial, Taylor};
use crate::verify::{sign_profile, Sign, SignInterval, VerificationReport};

/// Samples per sub-interval for the sign conditions.
pub const SIGN_SAMPLES: usize = 1000;
/// Largest admissible flap width.
pub const MAX_DELTA: f64 = 0.25;
/// Below this width the construction gives up.
pub const MIN_DELTA: f64 = 1e-6;
/// Taylor coefficients below this count as zero in conditions (v)-(ix).
const ZERO_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApexPaths {
    pub delta: f64,
    pub paths: Vec<Curve>,
    pub u: Vec<Vec<f64>>,
    pub w: Vec<f64>,
    /// `a_j = -vec h_j(w)`.
    pub a: Vec<f64>,
    /// `b_i0 = vec h_0(u_i)`.
    pub b: Vec<f64>,
    /// `c_ik = g_k(v_i)`.
    pub c: Vec<Vec<f64>>,
    /// `d_ik = vec g_k(u_i)`.
    pub d: Vec<Vec<f64>>,
    /// `e_ik = g_k(p)`.
    pub e: Vec<Vec<f64>>,
}

/// `w` with `vec h_j(w) = -1` for every `j`.
pub fn cone_vector(inst: &ApexInstance) -> Result<Vec<f64>> {
    let rows: Vec<Vec<f64>> = inst.h.iter().map(|f| f.coeffs.clone()).collect();
    crate::linalg::solve(&rows, &vec![-1.0; inst.n])
        .ok_or_else(|| Error::InfeasibleW("facet forms through the apex are dependent".into()))
}

/// The piecewise path `alpha_i` on `[-delta, 1 + delta]`.
pub fn apex_path(v: &[f64], u: &[f64], w: &[f64], p: &[f64], delta: f64) -> Curve {
    let zero = vec![0.0; v.len()];
    let arc0 = LocalPoly { center: 0.0, coeffs: vec![v.to_vec(), zero.clone(), u.to_vec(), w.to_vec()] };
    let arc1 = LocalPoly { center: 1.0, coeffs: vec![p.to_vec(), zero.clone(), zero, scale(w, -1.0)] };
    let start = arc0.eval_generic(&delta);
    let end = arc1.eval_generic(&(1.0 - delta));
    let seg = LocalPoly::segment(delta, &start, 1.0 - delta, &end);
    Curve::Piecewise(PiecewisePath {
        breaks: vec![-delta, delta, 1.0 - delta, 1.0 + delta],
        pieces: vec![arc0, seg, arc1],
    })
}

fn assemble(inst: &ApexInstance, w: &[f64], delta: f64) -> ApexPaths {
    let u = inst.u();
    let paths = (0..inst.n)
        .map(|i| apex_path(&inst.sigma[i], &u[i], w, &inst.apex, delta))
        .collect();
    let g = inst.g();
    ApexPaths {
        delta,
        paths,
        a: inst.h.iter().map(|f| -linear_part(f, w)).collect(),
        b: u.iter().map(|ui| linear_part(&inst.h0, ui)).collect(),
        c: inst.sigma.iter().map(|v| g.iter().map(|f| f.eval(v)).collect()).collect(),
        d: u.iter().map(|ui| g.iter().map(|f| linear_part(f, ui)).collect()).collect(),
        e: (0..inst.n).map(|_| g.iter().map(|f| f.eval(&inst.apex)).collect()).collect(),
        u,
        w: w.to_vec(),
    }
}

/// Forms in the order used by the sign profiles: `h_0, h_1..h_n, g_1..g_s`.
fn all_forms(inst: &ApexInstance) -> Vec<Polynomial> {
    let mut f: Vec<Polynomial> = inst.hat_forms().iter().map(LinearForm::to_polynomial).collect();
    f.extend(inst.g().iter().map(LinearForm::to_polynomial));
    f
}

/// The five sub-intervals of path `i` with their expected signs.
pub fn sign_intervals(inst: &ApexInstance, i: usize, delta: f64) -> Vec<SignInterval> {
    let n = inst.n;
    let s = inst.g().len();
    // (iii): interior of the apex simplex
    let mut hat = vec![Sign::Positive; n + 1];
    hat.extend(vec![Sign::Any; s]);
    // (iv): interior of K, negative side of every h_j with j != i
    let mut side = vec![Sign::Any];
    side.extend((0..n).map(|j| if j == i { Sign::Any } else { Sign::Negative }));
    side.extend(vec![Sign::Positive; s]);
    vec![
        SignInterval::new("before", -delta, 0.0, true, false, hat.clone()),
        SignInterval::new("leaving", 0.0, delta, false, true, side.clone()),
        SignInterval::new("segment", delta, 1.0 - delta, true, true, side.clone()),
        SignInterval::new("arriving", 1.0 - delta, 1.0, true, false, side),
        SignInterval::new("after", 1.0, 1.0 + delta, false, true, hat),
    ]
}

fn sign_report(inst: &ApexInstance, paths: &[Curve], delta: f64, samples: usize) -> Result<VerificationReport> {
    let forms = all_forms(inst);
    let parts = paths
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut r = sign_profile(p, &forms, &sign_intervals(inst, i, delta), samples)?;
            r.check = format!("alpha{}", i + 1);
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::merge("sign_conditions", &parts))
}

/// Taylor coefficients `0..=3` of `form o path` at `t0`.
fn coeffs(path: &Curve, form: &LinearForm, t0: f64) -> [f64; 4] {
    let x = path.eval_generic(&Taylor::variable(t0, 3));
    let v = form.to_polynomial().eval_generic(&x);
    [v.coeff(0), v.coeff(1), v.coeff(2), v.coeff(3)]
}

/// Leading-coefficient conditions (v)-(ix) read off the jets at 0 and 1,
/// as `(name, margin)`; each margin must be positive.
pub fn coefficient_margins(inst: &ApexInstance, paths: &[Curve]) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    // vanishing coefficients pass outright and fail with their size
    let zero = |c: &[f64]| {
        let m = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m <= ZERO_TOL {
            f64::INFINITY
        } else {
            -m
        }
    };
    for (i, path) in paths.iter().enumerate() {
        let id = i + 1;
        // (v)
        let c = coeffs(path, &inst.h[i], 0.0);
        out.push((format!("v.h{id}a{id}.const"), c[0]));
        out.push((format!("v.h{id}a{id}.quad"), -c[2]));
        out.push((format!("v.h{id}a{id}.cubic"), -c[3]));
        for (j, hj) in inst.h.iter().enumerate() {
            // (vi)
            if j != i {
                let c = coeffs(path, hj, 0.0);
                out.push((format!("vi.h{}a{id}.at0.low", j + 1), zero(&c[..3])));
                out.push((format!("vi.h{}a{id}.at0.cubic", j + 1), -c[3]));
            }
            let c = coeffs(path, hj, 1.0);
            out.push((format!("vi.h{}a{id}.at1.low", j + 1), zero(&c[..3])));
            out.push((format!("vi.h{}a{id}.at1.cubic", j + 1), c[3]));
        }
        // (vii)
        let c = coeffs(path, &inst.h0, 0.0);
        out.push((format!("vii.h0a{id}.low"), zero(&c[..2])));
        out.push((format!("vii.h0a{id}.quad"), c[2]));
        for (k, g) in inst.g().iter().enumerate() {
            // (viii)
            let c = coeffs(path, g, 0.0);
            let m = if c[0].abs() > ZERO_TOL { c[0] } else { zero(&c[1..2]).min(c[2]) };
            out.push((format!("viii.g{}a{id}", k + 1), m));
            // (ix)
            let c = coeffs(path, g, 1.0);
            out.push((format!("ix.g{}a{id}", k + 1), c[0]));
        }
    }
    out
}

/// Conditions (ii)-(ix) for the given paths, as one report.
pub fn check_conditions(inst: &ApexInstance, paths: &[Curve], delta: f64, samples: usize) -> Result<VerificationReport> {
    let mut report = sign_report(inst, paths, delta, samples)?;
    report.check = "apex_conditions".into();
    let mut worst_endpoint: f64 = 0.0;
    for (i, p) in paths.iter().enumerate() {
        worst_endpoint = worst_endpoint
            .max(crate::linalg::dist(&p.eval(0.0), &inst.sigma[i]))
            .max(crate::linalg::dist(&p.eval(1.0), &inst.apex));
    }
    report.detail("endpoint_error", worst_endpoint);
    if worst_endpoint > 1e-9 {
        report.passed = false;
        report.note(format!("endpoints off by {worst_endpoint:.3e}"));
    }
    let mut min_coeff = f64::INFINITY;
    for (name, m) in coefficient_margins(inst, paths) {
        if !(m > crate::verify::signs::SIGN_MARGIN) {
            report.passed = false;
            report.note(format!("condition {name} fails (margin {m:.3e})"));
        }
        min_coeff = min_coeff.min(m);
    }
    report.detail("coefficient_margin", min_coeff);
    report.detail("delta", delta);
    Ok(report)
}

/// Builds `alpha_1..alpha_n`: `w` from `vec h_j(w) = -1`, then the largest
/// `delta <= 1/4` (by bisection) for which the sampled sign conditions
/// hold, halved.
pub fn build_apex_paths(inst: &ApexInstance) -> Result<ApexPaths> {
    inst.validate()?;
    let w = cone_vector(inst)?;
    let ok = |delta: f64| -> Result<bool> {
        let p = assemble(inst, &w, delta);
        Ok(sign_report(inst, &p.paths, delta, SIGN_SAMPLES)?.passed)
    };
    // halve down to the first passing width, then bisect against the last
    // failing one; very small widths drown the cubic terms in rounding
    let mut lo = MAX_DELTA;
    while !ok(lo)? {
        lo *= 0.5;
        if lo < MIN_DELTA {
            return Err(Error::NoDelta(MIN_DELTA));
        }
    }
    let mut hi = 2.0 * lo;
    if lo < MAX_DELTA {
        hi = hi.min(MAX_DELTA);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if ok(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let delta = lo;
    let paths = assemble(inst, &w, 0.5 * delta);
    let report = check_conditions(inst, &paths.paths, paths.delta, SIGN_SAMPLES)?;
    if !report.passed {
        return Err(Error::NoDelta(paths.delta));
    }
    Ok(paths)
}

impl ApexPaths {
    pub fn domain(&self) -> (f64, f64) {
        (-self.delta, 1.0 + self.delta)
    }

    /// `F(lambda, t) = sum lambda_i alpha_i(t)`.
    pub fn combine(&self, lambda: &[f64], t: f64) -> Vec<f64> {
        let pts: Vec<Vec<f64>> = self.paths.iter().map(|p| p.eval(t)).collect();
        combine(lambda, &pts)
    }

    /// Same constants, new paths (smoothed or perturbed).
    pub fn with_paths(&self, paths: Vec<Curve>) -> Self {
        ApexPaths { paths, ..self.clone() }
    }
}
