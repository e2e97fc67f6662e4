//! Chaining apex sweeps of several instances into one polynomial path of
//! configurations, in a single flat chart.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::ApexInstance;
use super::map::CoverMap;
use super::paths::{build_apex_paths, check_conditions, ApexPaths, SIGN_SAMPLES};
use super::smooth::SMOOTH_ORDER;
use crate::error::{Error, Result};
use crate::linalg::{combine, dist};
use crate::models::region::{dirichlet, stream_rng};
use crate::models::{chebyshev_center, ConvexPolytope, CornerComplex, LinearForm, Region, SampleMode};
use crate::pathfit::{approx_fit, Curve, FitOptions, FitResult, JetSpec};
use crate::polycore::Mapping;
use crate::verify::{check_coverage_points, CoverageOptions, VerificationReport};

/// Interiors thinner than this do not connect two instances.
pub const MIN_OVERLAP: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanOptions {
    /// Sup tolerance of the global polynomial against the concatenation.
    pub fit_eps: f64,
    pub fit: FitOptions,
    pub targets: usize,
    pub samples: usize,
    pub seed: u64,
    pub coverage: CoverageOptions,
}

impl Default for FanOptions {
    fn default() -> Self {
        FanOptions {
            fit_eps: 5e-4,
            fit: FitOptions { start_degree: 16, degree_step: 16, max_degree: 480, ..FitOptions::default() },
            targets: 1000,
            samples: 10_000,
            seed: 5,
            coverage: CoverageOptions::default(),
        }
    }
}

/// `(lambda_1..lambda_{n-1}, t) -> sum lambda_j gamma_j(t)`, where the
/// configuration path `gamma` stacks `n` points of `R^n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FanMap {
    pub n: usize,
    pub gamma: Curve,
}

impl FanMap {
    pub fn eval(&self, lambda: &[f64], t: f64) -> Vec<f64> {
        let c = self.gamma.eval(t);
        let pts: Vec<Vec<f64>> = c.chunks(self.n).map(<[f64]>::to_vec).collect();
        combine(lambda, &pts)
    }

    /// `Delta_{n-1} x [0, 1]` in the coordinates of [`CoverMap::domain`].
    pub fn domain(&self) -> Result<ConvexPolytope> {
        let n = self.n;
        let mut verts = Vec::new();
        for t in [0.0, 1.0] {
            for i in 0..n {
                let mut v = vec![0.0; n];
                if i + 1 < n {
                    v[i] = 1.0;
                }
                v[n - 1] = t;
                verts.push(v);
            }
        }
        ConvexPolytope::from_vertices(verts)
    }
}

impl Mapping for FanMap {
    fn domain_dim(&self) -> usize {
        self.n
    }
    fn codomain_dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval(&CoverMap::lambda(&x[..self.n - 1]), x[self.n - 1]))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FanCover {
    pub instances: Vec<ApexInstance>,
    /// Sweep windows `(t_i, s_i)`.
    pub times: Vec<(f64, f64)>,
    /// The continuous concatenation that was fitted.
    pub concatenation: Curve,
    pub fit: FitResult,
    pub map: FanMap,
    pub report: VerificationReport,
}

/// `t_i = (i + 0.2) / r`, `s_i = (i + 0.8) / r`.
pub fn default_times(r: usize) -> Vec<(f64, f64)> {
    (0..r)
        .map(|i| ((i as f64 + 0.2) / r as f64, (i as f64 + 0.8) / r as f64))
        .collect()
}

/// Center of the largest ball in `K_a ∩ K_b`.
fn overlap_center(a: &ConvexPolytope, b: &ConvexPolytope) -> Result<Vec<f64>> {
    let forms: Vec<LinearForm> = a.facets().iter().chain(b.facets()).cloned().collect();
    let (c, r) = chebyshev_center(&forms, a.dim())
        .map_err(|e| Error::Connectivity(format!("polytopes do not meet: {e}")))?;
    if !(r > MIN_OVERLAP) {
        return Err(Error::Connectivity(format!("interiors do not meet (inradius {r:.3e})")));
    }
    Ok(c)
}

fn configuration(point: &[f64], n: usize) -> Curve {
    Curve::constant(&point.repeat(n))
}

/// An apex path with its two kinks rounded: C^3 smoothstep windows
/// `[delta/2, delta/2 + width]` and its mirror image, exact cubic arcs
/// outside them. Any convex blend of the pieces keeps `h_j < 0` for
/// `j != i` on `(0, 1)`; the facets of `K` are checked by the caller.
pub fn rounded_path(path: &Curve, delta: f64, width: f64) -> Result<Curve> {
    let Curve::Piecewise(p) = path else {
        return Err(Error::InvalidInput("rounding needs a piecewise apex path".into()));
    };
    if p.pieces.len() != 3 {
        return Err(Error::InvalidInput("apex paths have three pieces".into()));
    }
    let piece = |k: usize| {
        Curve::Piecewise(crate::pathfit::PiecewisePath { breaks: vec![-delta, 1.0 + delta], pieces: vec![p.pieces[k].clone()] })
    };
    let (arc0, seg, arc1) = (piece(0), piece(1), piece(2));
    let h = 0.5 * delta;
    if !(width >= delta && h + width <= 0.5) {
        return Err(Error::InvalidInput(format!("rounding width {width} outside [{delta}, {}]", 0.5 - h)));
    }
    let w = [h, h + width, 1.0 - h - width, 1.0 - h];
    Ok(Curve::Concat {
        breaks: vec![-delta, w[0], w[1], w[2], w[3], 1.0 + delta],
        parts: vec![
            arc0.clone(),
            Curve::Blend { a: w[0], b: w[1], from: Box::new(arc0), to: Box::new(seg.clone()) },
            seg.clone(),
            Curve::Blend { a: w[2], b: w[3], from: Box::new(seg), to: Box::new(arc1.clone()) },
            arc1,
        ],
    })
}

/// Rounded paths with the widest window, halved from the midpoint down to
/// `delta`, that keeps every sign condition.
pub fn rounded_paths(inst: &ApexInstance, paths: &ApexPaths) -> Result<Vec<Curve>> {
    let delta = paths.delta;
    let mut width = 0.5 - 0.5 * delta;
    loop {
        let rounded = paths
            .paths
            .iter()
            .map(|p| rounded_path(p, delta, width))
            .collect::<Result<Vec<_>>>()?;
        let conditions = check_conditions(inst, &rounded, delta, SIGN_SAMPLES)?;
        if conditions.passed {
            return Ok(rounded);
        }
        if width <= delta {
            return Err(Error::Precondition(format!("rounded apex paths: {}", conditions.summary())));
        }
        width = (0.5 * width).max(delta);
    }
}

/// The rounded sweep of one instance, stacked and reparametrized so that
/// path time 0 lands on `t` and path time 1 on `s`.
fn sweep(cover: &CoverMap, t: f64, s: f64) -> Curve {
    Curve::Reparam {
        inner: Box::new(Curve::Stack { parts: cover.paths.paths.clone() }),
        shift: t,
        rate: 1.0 / (s - t),
    }
}

/// Whether every point of the configuration lies in one common polytope.
fn union_margin(instances: &[ApexInstance], n: usize, x: &[f64]) -> f64 {
    instances
        .iter()
        .map(|inst| {
            x.chunks(n)
                .map(|p| inst.polytope.min_facet_value(p))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Concatenate the instances' sweeps with C^3 bridges through interior
/// configurations, fit one polynomial path with the order-3 jets of the
/// concatenation at every `t_i, s_i`, and certify the resulting map.
pub fn fan_cover(instances: &[ApexInstance], times: Option<Vec<(f64, f64)>>, opts: &FanOptions) -> Result<FanCover> {
    let r = instances.len();
    if r == 0 {
        return Err(Error::InvalidInput("fan needs at least one instance".into()));
    }
    let n = instances[0].n;
    if let Some(i) = instances.iter().position(|inst| inst.n != n) {
        return Err(Error::dim(format!("instance {i}"), n, instances[i].n));
    }
    let times = times.unwrap_or_else(|| default_times(r));
    if times.len() != r {
        return Err(Error::dim("sweep windows", r, times.len()));
    }
    let flat: Vec<f64> = times.iter().flat_map(|(t, s)| [*t, *s]).collect();
    if !(flat[0] > 0.0 && flat[2 * r - 1] < 1.0 && flat.windows(2).all(|w| w[0] < w[1])) {
        return Err(Error::InvalidInput("need 0 < t_1 < s_1 < ... < t_r < s_r < 1".into()));
    }
    let mut centers = vec![instances[0].polytope.chebyshev_center()?.0];
    for w in instances.windows(2) {
        centers.push(overlap_center(&w[0].polytope, &w[1].polytope)?);
    }
    centers.push(instances[r - 1].polytope.chebyshev_center()?.0);

    let sweeps = instances
        .iter()
        .zip(&times)
        .map(|(inst, (t, s))| {
            let paths = build_apex_paths(inst)?;
            let rounded = rounded_paths(inst, &paths)?;
            let cover = CoverMap::new(inst.clone(), paths.with_paths(rounded))?;
            let delta = cover.paths.delta * (s - t);
            Ok((sweep(&cover, *t, *s), t - delta, s + delta))
        })
        .collect::<Result<Vec<_>>>()?;

    // start blend, then per instance: sweep, bridge halves; end blend
    let mut breaks = vec![0.0];
    let mut parts = Vec::new();
    let mut prev_end = 0.0;
    let mut prev_curve = configuration(&centers[0], n);
    for (i, (a, lo, hi)) in sweeps.iter().enumerate() {
        if !(*lo > prev_end) {
            return Err(Error::InvalidInput(format!("sweep window {i} leaves no room for a bridge")));
        }
        let mid = 0.5 * (prev_end + lo);
        let center = configuration(&centers[i], n);
        if i == 0 {
            parts.push(Curve::Blend {
                a: 0.0,
                b: *lo,
                from: Box::new(center),
                to: Box::new(a.taylor(*lo, SMOOTH_ORDER)?),
            });
            breaks.push(*lo);
        } else {
            parts.push(Curve::Blend {
                a: prev_end,
                b: mid,
                from: Box::new(prev_curve.taylor(prev_end, SMOOTH_ORDER)?),
                to: Box::new(center.clone()),
            });
            breaks.push(mid);
            parts.push(Curve::Blend {
                a: mid,
                b: *lo,
                from: Box::new(center),
                to: Box::new(a.taylor(*lo, SMOOTH_ORDER)?),
            });
            breaks.push(*lo);
        }
        parts.push(a.clone());
        breaks.push(*hi);
        prev_end = *hi;
        prev_curve = a.clone();
    }
    if !(prev_end < 1.0) {
        return Err(Error::InvalidInput("last sweep window runs past 1".into()));
    }
    parts.push(Curve::Blend {
        a: prev_end,
        b: 1.0,
        from: Box::new(prev_curve.taylor(prev_end, SMOOTH_ORDER)?),
        to: Box::new(configuration(&centers[r], n)),
    });
    breaks.push(1.0);
    let concatenation = Curve::Concat { breaks, parts };

    let spec = JetSpec::from_curve(&concatenation, &flat, SMOOTH_ORDER)?;
    let set = |x: &[f64]| union_margin(instances, n, x);
    let fit_opts = FitOptions { domain: (0.0, 1.0), ..opts.fit.clone() };
    let fit = approx_fit(&concatenation, &spec, opts.fit_eps, Some(&set), &fit_opts)?;
    let map = FanMap { n, gamma: fit.path.clone() };
    let report = certify(&map, instances, &times, opts)?;
    Ok(FanCover { instances: instances.to_vec(), times, concatenation, fit, map, report })
}

/// Every cell of a corner complex, in order.
pub fn fan_cover_complex(complex: &CornerComplex, opts: &FanOptions) -> Result<FanCover> {
    let instances = (0..complex.cells.len())
        .map(|i| ApexInstance::from_corner_cell(complex, i))
        .collect::<Result<Vec<_>>>()?;
    fan_cover(&instances, None, opts)
}

/// Coverage of the union of apex simplices, containment in the union of
/// polytopes and the base slices at every `t_i`.
pub fn certify(map: &FanMap, instances: &[ApexInstance], times: &[(f64, f64)], opts: &FanOptions) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let n = map.n;
    let r = instances.len();
    let mut targets = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let hat = inst.hat_simplex()?;
        targets.extend(hat.sample(opts.targets.div_ceil(r), opts.seed + i as u64, SampleMode::Interior)?);
        targets.extend(hat.vertices().iter().cloned());
    }
    let domain = map.domain()?;
    let cov = check_coverage_points(map, &domain, &targets, opts.seed, &opts.coverage)?;

    let points = domain.sample(opts.samples, opts.seed, SampleMode::Interior)?;
    let containment = points
        .par_iter()
        .map(|x| {
            let y = map.apply(x).expect("fan map is total");
            instances
                .iter()
                .map(|inst| inst.polytope.min_facet_value(&y))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::INFINITY, f64::min);

    let mut rng = stream_rng(opts.seed, 77);
    let mut lambdas: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    while lambdas.len() < 200 {
        lambdas.push(dirichlet(&mut rng, n));
    }
    let mut slice_error: f64 = 0.0;
    for (inst, (t, _)) in instances.iter().zip(times) {
        for l in &lambdas {
            slice_error = slice_error.max(dist(&map.eval(l, *t), &combine(l, &inst.sigma)));
        }
    }

    let mut report = VerificationReport::new("fan_cover", targets.len(), opts.seed)
        .tolerance("gap", opts.coverage.gap_tol)
        .tolerance("slice", 1e-3)
        .tolerance("containment", 1e-9);
    report.coverage_gap = cov.coverage_gap;
    report.detail("containment_margin", containment);
    report.detail("slice_error", slice_error);
    report.detail("instances", r as f64);
    let gap_ok = cov.coverage_gap.is_some_and(|g| g < opts.coverage.gap_tol);
    report.passed = gap_ok && containment >= -1e-9 && slice_error < 1e-3;
    report.worst_violation = (-containment).max(0.0).max(slice_error - 1e-3).max(0.0);
    if !gap_ok {
        report.note(format!("coverage: {}", cov.summary()));
    }
    Ok(report.timed(start))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_instance_reduces_to_its_cover() {
        let inst = ApexInstance::unit_triangle();
        let f = fan_cover(std::slice::from_ref(&inst), None, &FanOptions { targets: 300, ..FanOptions::default() }).unwrap();
        assert!(f.report.passed, "{}", f.report.summary());
        assert!(f.fit.path.is_single_polynomial());
        // at t_1 the paths sit on the base vertices, at s_1 on the apex
        let (t, s) = f.times[0];
        for j in 0..2 {
            let mut l = vec![0.0; 2];
            l[j] = 1.0;
            assert!(dist(&f.map.eval(&l, t), &inst.sigma[j]) < 1e-7);
            assert!(dist(&f.map.eval(&l, s), &inst.apex) < 1e-7);
        }
    }

    #[test]
    fn disjoint_polytopes_do_not_connect() {
        let a = ConvexPolytope::from_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = ConvexPolytope::from_vertices(vec![vec![5.0, 5.0], vec![6.0, 5.0], vec![5.0, 6.0]]).unwrap();
        assert!(matches!(overlap_center(&a, &b), Err(Error::Connectivity(_))));
        assert!(overlap_center(&a, &a).is_ok());
    }
}
