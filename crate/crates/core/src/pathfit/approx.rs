//! Jet-preserving polynomial approximation of piecewise paths inside an
//! open set.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::curve::{ChebSeries, Curve};
use super::hermite::{confluent_system, JetSpec};
use crate::error::{Error, Result};
use crate::models::region::stream_rng;
use crate::models::SemialgebraicSet;

/// Jet agreement demanded of the target and of every fit.
pub const JET_TOL: f64 = 1e-8;
/// Anchors closer than this to a breakpoint of the target are rejected.
pub const BREAK_GAP: f64 = 1e-12;

/// Signed distance-like membership of an open set: positive inside.
pub trait Membership: Sync {
    fn margin(&self, x: &[f64]) -> f64;
}

impl Membership for SemialgebraicSet {
    fn margin(&self, x: &[f64]) -> f64 {
        SemialgebraicSet::margin(self, x)
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Membership for F {
    fn margin(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Parameter interval of the target; must contain the anchors.
    pub domain: (f64, f64),
    pub samples: usize,
    pub seeds: Vec<u64>,
    pub start_degree: usize,
    pub degree_step: usize,
    pub max_degree: usize,
    /// Points per neighborhood for derivative deviations.
    pub neighborhood_samples: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            domain: (0.0, 1.0),
            samples: 10_000,
            seeds: vec![1, 2],
            start_degree: 4,
            degree_step: 4,
            max_degree: 200,
            neighborhood_samples: 64,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitResult {
    pub path: Curve,
    pub domain: (f64, f64),
    /// Total polynomial degree of the path.
    pub degree: usize,
    pub correction_degree: usize,
    pub max_deviation: f64,
    /// `max |alpha^(k) - beta^(k)|` over the anchor neighborhoods, `k = 0..=m`.
    pub derivative_deviations: Vec<f64>,
    /// Half-width of the anchor neighborhoods where derivatives were compared.
    pub anchor_radius: f64,
    /// Minimum over samples of margin / min(1, dist to anchors)^(m+1).
    pub membership_margin: f64,
    /// The same minimum per seed.
    pub seed_margins: Vec<f64>,
    /// Unnormalized minimum margin.
    pub raw_margin: f64,
    pub jet_residual: f64,
}

impl FitResult {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.path.eval(t)
    }

    /// JSON with the path embedded as a map expression.
    pub fn to_json(&self) -> Result<Value> {
        let mut v = serde_json::to_value(self)?;
        v["map"] = self.path.to_map()?.to_json();
        Ok(v)
    }
}

struct Sampler<'a> {
    spec: &'a JetSpec,
    opts: &'a FitOptions,
}

impl Sampler<'_> {
    fn grid(&self) -> Vec<f64> {
        let (a, b) = self.opts.domain;
        let n = self.opts.samples.max(2);
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    fn random(&self, seed: u64) -> Vec<f64> {
        let (a, b) = self.opts.domain;
        let mut rng = stream_rng(seed, 0);
        (0..self.opts.samples).map(|_| rng.random_range(a..=b)).collect()
    }

    fn anchor_distance(&self, t: f64) -> f64 {
        self.spec
            .anchors
            .iter()
            .map(|a| (t - a).abs())
            .fold(f64::INFINITY, f64::min)
    }

    fn excluded(&self, t: f64) -> bool {
        let (a, b) = self.opts.domain;
        self.anchor_distance(t) < 1e-9 * (b - a)
    }

    /// (normalized, raw) minimum margin over `ts`.
    fn margins(&self, path: &Curve, set: &dyn Membership, ts: &[f64]) -> (f64, f64) {
        let power = (self.spec.order + 1) as i32;
        ts.par_iter()
            .filter(|t| !self.excluded(**t))
            .map(|&t| {
                let raw = set.margin(&path.eval(t));
                let d = self.anchor_distance(t).min(1.0);
                (raw / d.powi(power), raw)
            })
            .reduce(
                || (f64::INFINITY, f64::INFINITY),
                |x, y| (x.0.min(y.0), x.1.min(y.1)),
            )
    }
}

fn sup_deviation(a: &Curve, b: &Curve, ts: &[f64]) -> f64 {
    ts.par_iter()
        .map(|&t| crate::linalg::max_abs(&crate::linalg::sub(&a.eval(t), &b.eval(t))))
        .reduce(|| 0.0, f64::max)
}

/// Neighborhood half-widths: half the gap to the nearest other anchor,
/// breakpoint or domain end, capped at a tenth of the domain.
fn base_radii(spec: &JetSpec, target: &Curve, domain: (f64, f64)) -> Vec<f64> {
    let breaks = target.breakpoints();
    let span = domain.1 - domain.0;
    spec.anchors
        .iter()
        .map(|&t| {
            let mut gap: f64 = 0.1 * span;
            for &s in spec.anchors.iter().chain(&breaks) {
                if s != t {
                    gap = gap.min(0.5 * (s - t).abs());
                }
            }
            gap
        })
        .collect()
}

/// Per-order derivative deviations on `[t_i - r, t_i + r]`.
fn derivative_deviation(
    target: &Curve,
    path: &Curve,
    spec: &JetSpec,
    domain: (f64, f64),
    radii: &[f64],
    n: usize,
) -> Result<Vec<f64>> {
    let m = spec.order;
    let mut ts = Vec::new();
    for (&t, &r) in spec.anchors.iter().zip(radii) {
        let lo = (t - r).max(domain.0);
        let hi = (t + r).min(domain.1);
        for k in 0..n {
            ts.push(lo + (hi - lo) * k as f64 / (n - 1).max(1) as f64);
        }
    }
    let devs = ts
        .par_iter()
        .map(|&t| -> Result<Vec<f64>> {
            let ja = target.jet(t, m)?;
            let jb = path.jet(t, m)?;
            Ok(ja
                .derivatives
                .iter()
                .zip(&jb.derivatives)
                .map(|(x, y)| crate::linalg::max_abs(&crate::linalg::sub(x, y)))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = vec![0.0f64; m + 1];
    for d in devs {
        for (w, v) in worst.iter_mut().zip(d) {
            *w = w.max(v);
        }
    }
    Ok(worst)
}

fn chebyshev_row(s: f64, degree: usize) -> Vec<f64> {
    let mut row = vec![1.0; degree + 1];
    if degree >= 1 {
        row[1] = s;
    }
    for j in 2..=degree {
        row[j] = 2.0 * s * row[j - 1] - row[j - 2];
    }
    row
}

/// Least squares over Chebyshev coefficients with the anchor jets as
/// equality constraints. Every feasible polynomial is
/// `hermite + prod (t - t_i)^(m+1) c`, so this fits the correction `c`
/// without ever forming the flat weight, whose dynamic range is hopeless
/// in floating point once there are several anchors.
struct ConstrainedSystem {
    basis: DMatrix<f64>,
    values: DMatrix<f64>,
    rows: DMatrix<f64>,
    rhs: DMatrix<f64>,
    a: f64,
    b: f64,
}

impl ConstrainedSystem {
    fn new(target: &Curve, spec: &JetSpec, domain: (f64, f64), max_total: usize) -> Self {
        let (a, b) = domain;
        let n = (3 * (max_total + 1)).max(800);
        let dim = spec.dim();
        let mut basis = DMatrix::zeros(n, max_total + 1);
        let mut values = DMatrix::zeros(n, dim);
        for k in 0..n {
            let s = (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos();
            let t = 0.5 * (a + b) + 0.5 * (b - a) * s;
            for (j, v) in chebyshev_row(s, max_total).into_iter().enumerate() {
                basis[(k, j)] = v;
            }
            for (j, x) in target.eval(t).into_iter().enumerate() {
                values[(k, j)] = x;
            }
        }
        let (rows, rhs) = confluent_system(spec, a, b, max_total + 1);
        ConstrainedSystem { basis, values, rows, rhs, a, b }
    }

    /// Coefficients of the constrained fit of total degree `total`.
    fn solve(&self, total: usize) -> Result<ChebSeries> {
        let k = total + 1;
        let p = self.rows.nrows();
        let singular = || Error::IllConditioned { residual: f64::INFINITY };
        // C^T = Q R; Q = [Q1 Q2] splits coefficient space into the
        // constrained directions and the null space of C
        let qr = self.rows.columns(0, k).transpose().qr();
        let mut qt = DMatrix::identity(k, k);
        qr.q_tr_mul(&mut qt);
        let q = qt.transpose();
        let r1 = qr.r();
        let y1 = r1.transpose().solve_lower_triangular(&self.rhs).ok_or_else(singular)?;
        let particular = q.columns(0, p) * y1;
        let a = self.basis.columns(0, k);
        let residual = &self.values - a * &particular;
        let q2 = q.columns(p, k - p);
        let mut design = a * q2;
        let norms: Vec<f64> = (0..k - p)
            .map(|j| design.column(j).norm().max(f64::MIN_POSITIVE))
            .collect();
        for (j, s) in norms.iter().enumerate() {
            design.column_mut(j).scale_mut(1.0 / s);
        }
        let qr2 = design.qr();
        let mut qtb = residual;
        qr2.q_tr_mul(&mut qtb);
        let mut z = qr2
            .r()
            .solve_upper_triangular(&qtb.rows(0, k - p).into_owned())
            .ok_or_else(singular)?;
        for (j, s) in norms.iter().enumerate() {
            z.row_mut(j).scale_mut(1.0 / s);
        }
        let mut sol = particular + q2 * z;
        // one round of refinement on the constraint rows
        let defect = &self.rhs - self.rows.columns(0, k) * &sol;
        if let Some(fix) = r1.transpose().solve_lower_triangular(&defect) {
            sol += q.columns(0, p) * fix;
        }
        let coeffs: Vec<Vec<f64>> = (0..k)
            .map(|j| (0..sol.ncols()).map(|c| sol[(j, c)]).collect())
            .collect();
        if coeffs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(singular());
        }
        Ok(ChebSeries { a: self.a, b: self.b, coeffs })
    }
}

/// Validates the target against the spec and the open set.
fn check_target(
    target: &Curve,
    spec: &JetSpec,
    set: Option<&dyn Membership>,
    sampler: &Sampler,
) -> Result<()> {
    let (a, b) = sampler.opts.domain;
    if !(a < b) || spec.anchors.iter().any(|t| *t < a || *t > b) {
        return Err(Error::Precondition("anchors must lie in the fit domain".into()));
    }
    if target.dim() != spec.dim() {
        return Err(Error::dim("target path", spec.dim(), target.dim()));
    }
    for s in target.breakpoints() {
        if spec.anchors.iter().any(|t| (t - s).abs() <= BREAK_GAP) {
            return Err(Error::Precondition(format!(
                "anchor at breakpoint {s}: target not polynomial near the anchor"
            )));
        }
    }
    let residual = spec.residual(target)?;
    if residual >= JET_TOL {
        return Err(Error::Precondition(format!(
            "target jets differ from the spec (residual {residual:.3e})"
        )));
    }
    if let Some(set) = set {
        let (_, raw) = sampler.margins(target, set, &sampler.grid());
        if !(raw > 0.0) {
            return Err(Error::Precondition(format!(
                "target leaves the open set (margin {raw:.3e})"
            )));
        }
    }
    Ok(())
}

/// `beta = hermite(spec) + prod (t - t_i)^(m+1) * c(t)`, raising the degree
/// of `c` until deviation, derivative and membership checks pass. The path
/// is returned as one Chebyshev series.
pub fn approx_fit(
    target: &Curve,
    spec: &JetSpec,
    eps: f64,
    set: Option<&dyn Membership>,
    opts: &FitOptions,
) -> Result<FitResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let sampler = Sampler { spec, opts };
    check_target(target, spec, set, &sampler)?;
    let constraints = spec.anchors.len() * (spec.order + 1);
    let grid = sampler.grid();
    let radii0 = base_radii(spec, target, opts.domain);
    let randoms: Vec<Vec<f64>> = opts.seeds.iter().map(|s| sampler.random(*s)).collect();
    let mut last_reason = String::from("no degree tried");
    let system = ConstrainedSystem::new(target, spec, opts.domain, constraints + opts.max_degree);
    let mut degree = opts.start_degree;
    while degree <= opts.max_degree {
        let path = Curve::Chebyshev(system.solve(constraints + degree)?);
        let dev = sup_deviation(target, &path, &grid);
        if !(dev < eps) {
            last_reason = format!("sup deviation {dev:.3e} at correction degree {degree}");
            degree += opts.degree_step;
            continue;
        }
        let mut factor = 1.0;
        let mut derivs = None;
        for _ in 0..=30 {
            let radii: Vec<f64> = radii0.iter().map(|r| r * factor).collect();
            let d = derivative_deviation(target, &path, spec, opts.domain, &radii, opts.neighborhood_samples)?;
            if d.iter().all(|v| *v <= eps) {
                derivs = Some(d);
                break;
            }
            factor *= 0.5;
        }
        let Some(derivative_deviations) = derivs else {
            last_reason = format!("derivative deviation at correction degree {degree}");
            degree += opts.degree_step;
            continue;
        };
        let (mut norm_min, mut raw_min) = (f64::INFINITY, f64::INFINITY);
        let mut seed_margins = Vec::new();
        if let Some(set) = set {
            for ts in std::iter::once(&grid).chain(&randoms) {
                let (n, r) = sampler.margins(&path, set, ts);
                norm_min = norm_min.min(n);
                raw_min = raw_min.min(r);
                if !std::ptr::eq(ts, &grid) {
                    seed_margins.push(n);
                }
            }
            if !(raw_min > 0.0) {
                last_reason = format!("membership margin {raw_min:.3e} at correction degree {degree}");
                degree += opts.degree_step;
                continue;
            }
        }
        let jet_residual = spec.residual(&path)?;
        if jet_residual >= JET_TOL {
            return Err(Error::IllConditioned { residual: jet_residual });
        }
        let anchor_radius = radii0.iter().fold(f64::INFINITY, |m, r| m.min(r * factor));
        return Ok(FitResult {
            degree: constraints + degree,
            correction_degree: degree,
            path,
            domain: opts.domain,
            max_deviation: dev,
            derivative_deviations,
            anchor_radius,
            membership_margin: norm_min,
            seed_margins,
            raw_margin: raw_min,
            jet_residual,
        });
    }
    Err(Error::DegreeCap {
        cap: opts.max_degree,
        reason: last_reason,
    })
}

/// Re-measure the normalized membership margin of a fit with a new seed.
pub fn reverify_margin(fit: &FitResult, spec: &JetSpec, set: &dyn Membership, seed: u64, samples: usize) -> f64 {
    let opts = FitOptions {
        domain: fit.domain,
        samples,
        ..FitOptions::default()
    };
    let sampler = Sampler { spec, opts: &opts };
    sampler.margins(&fit.path, set, &sampler.random(seed)).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathfit::curve::{LocalPoly, PiecewisePath};

    fn cubic() -> Curve {
        Curve::Piecewise(
            PiecewisePath::new(
                vec![0.0, 1.0],
                vec![LocalPoly::new(0.0, vec![vec![0.2, 0.5], vec![0.3, 0.0], vec![0.0, -0.4], vec![0.1, 0.2]]).unwrap()],
            )
            .unwrap(),
        )
    }

    fn tent() -> Curve {
        Curve::Piecewise(
            PiecewisePath::new(
                vec![0.0, 0.5, 1.0],
                vec![
                    LocalPoly::segment(0.0, &[0.1, 0.5], 0.5, &[0.5, 0.9]),
                    LocalPoly::segment(0.5, &[0.5, 0.9], 1.0, &[0.9, 0.5]),
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn polynomial_target_is_reproduced() {
        let c = cubic();
        let spec = JetSpec::from_curve(&c, &[0.25, 0.75], 3).unwrap();
        let fit = approx_fit(&c, &spec, 1e-6, None, &FitOptions::default()).unwrap();
        assert_eq!(fit.correction_degree, 4);
        assert!(fit.max_deviation < 1e-12);
    }

    #[test]
    fn kinked_target_inside_square() {
        let c = tent();
        let spec = JetSpec::from_curve(&c, &[0.2, 0.8], 3).unwrap();
        let open = |x: &[f64]| x.iter().map(|v| v.min(1.0 - v)).fold(f64::INFINITY, f64::min);
        let fit = approx_fit(&c, &spec, 1e-2, Some(&open), &FitOptions::default()).unwrap();
        assert!(fit.max_deviation < 1e-2);
        assert!(fit.raw_margin > 0.0);
        assert!(fit.jet_residual < JET_TOL);
        assert_eq!(fit.seed_margins.len(), 2);
    }

    #[test]
    fn anchor_on_breakpoint_is_rejected() {
        let c = tent();
        let spec = JetSpec::from_curve(&c, &[0.5], 1);
        // the jet at a kink is one-sided, so either the spec or the fit refuses
        if let Ok(spec) = spec {
            assert!(matches!(
                approx_fit(&c, &spec, 1e-2, None, &FitOptions::default()),
                Err(Error::Precondition(_))
            ));
        }
    }

    #[test]
    fn degree_cap_is_reported() {
        let c = tent();
        let spec = JetSpec::from_curve(&c, &[0.2], 1).unwrap();
        let opts = FitOptions { max_degree: 8, ..FitOptions::default() };
        assert!(matches!(approx_fit(&c, &spec, 1e-9, None, &opts), Err(Error::DegreeCap { .. })));
    }
}
