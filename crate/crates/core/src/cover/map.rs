//! The prism map `F(lambda, t) = sum lambda_i alpha_i(t)` and its checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::{orientation, ApexInstance};
use super::paths::ApexPaths;
use super::retraction::radial_retraction;
use crate::error::{Error, Result};
use crate::linalg::{combine, dist};
use crate::models::region::{dirichlet, stream_rng};
use crate::models::{ConvexPolytope, Region, SampleMode};
use crate::polycore::{Jet, Mapping, Scalar, Taylor};
use crate::verify::{check_coverage_points, winding_number, CoverageOptions, VerificationReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverMap {
    pub instance: ApexInstance,
    pub paths: ApexPaths,
}

/// Sampling density of the sweeps over `Delta x T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub lambdas: usize,
    pub times: usize,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { lambdas: 64, times: 1000, seed: 7 }
    }
}

/// Minimum margins of the conclusions of the covering lemma; each must be
/// positive, and the coverage gap below its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conclusions {
    /// `min g_k(F)` over `Delta x (0,1)`.
    pub interior: f64,
    /// `-max hat_margin(F)` over `dDelta x (0,1)`: positive when outside.
    pub exclusion: f64,
    /// `min hat_margin(F)` over the flaps of half width.
    pub flaps: f64,
    pub coverage_gap: Option<f64>,
}

impl Conclusions {
    pub fn cheap_pass(&self) -> bool {
        self.interior > 0.0 && self.exclusion > 0.0 && self.flaps > 0.0
    }

    pub fn passed(&self, gap_tol: f64) -> bool {
        self.cheap_pass() && self.coverage_gap.is_some_and(|g| g < gap_tol)
    }
}

/// Interior sample times `(k + 1/2) / n` of `(lo, hi)`.
fn open_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64).collect()
}

impl CoverMap {
    pub fn new(instance: ApexInstance, paths: ApexPaths) -> Result<Self> {
        if instance.n < 2 {
            return Err(Error::Unsupported("cover maps need n >= 2".into()));
        }
        if paths.paths.len() != instance.n {
            return Err(Error::dim("apex paths", instance.n, paths.paths.len()));
        }
        Ok(CoverMap { instance, paths })
    }

    pub fn n(&self) -> usize {
        self.instance.n
    }

    pub fn eval(&self, lambda: &[f64], t: f64) -> Vec<f64> {
        self.paths.combine(lambda, t)
    }

    pub fn eval_generic<S: Scalar>(&self, lambda: &[f64], t: &S) -> Vec<S> {
        let mut acc = vec![t.lift(0.0); self.n()];
        for (l, p) in lambda.iter().zip(&self.paths.paths) {
            for (a, v) in acc.iter_mut().zip(p.eval_generic(t)) {
                *a = a.add(&v.scale(*l));
            }
        }
        acc
    }

    /// t-jet of `F(lambda, .)` at `t0`.
    pub fn jet(&self, lambda: &[f64], t0: f64, m: usize) -> Result<Jet> {
        crate::polycore::jet::check_order(m)?;
        Ok(Jet::from_taylor(t0, m, &self.eval_generic(lambda, &Taylor::variable(t0, m))))
    }

    /// Full barycentric weights from the first `n - 1`.
    pub fn lambda(x: &[f64]) -> Vec<f64> {
        let mut l = x.to_vec();
        l.push(1.0 - x.iter().sum::<f64>());
        l
    }

    /// `{(lambda_1..lambda_{n-1}, t)}` with `t` in `[lo, hi]`.
    pub fn domain(&self, lo: f64, hi: f64) -> Result<ConvexPolytope> {
        let n = self.n();
        let mut verts = Vec::new();
        for t in [lo, hi] {
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

    /// Vertices of `Delta_{n-1}` then seeded interior points; a uniform
    /// grid when `n = 2`.
    pub fn lambda_samples(&self, k: usize, seed: u64) -> Vec<Vec<f64>> {
        let n = self.n();
        if n == 2 {
            let k = k.max(2);
            return (0..k)
                .map(|j| {
                    let s = j as f64 / (k - 1) as f64;
                    vec![1.0 - s, s]
                })
                .collect();
        }
        let mut out: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let mut rng = stream_rng(seed, 11);
        while out.len() < k.max(n) {
            out.push(dirichlet(&mut rng, n));
        }
        out
    }

    /// Points of the face `lambda_i = 0`.
    fn face_samples(&self, i: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut rng = stream_rng(seed, 100 + i as u64);
        let mut out: Vec<Vec<f64>> = (0..n)
            .filter(|j| *j != i)
            .map(|j| (0..n).map(|l| if l == j { 1.0 } else { 0.0 }).collect())
            .collect();
        while out.len() < k.max(1) && n > 2 {
            let w = dirichlet(&mut rng, n - 1);
            let mut l = w;
            l.insert(i, 0.0);
            out.push(l);
        }
        out
    }

    fn min_over(&self, lambdas: &[Vec<f64>], times: &[f64], f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        lambdas
            .par_iter()
            .map(|l| {
                times
                    .iter()
                    .map(|t| f(&self.eval(l, *t)))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min)
    }

    /// Margins of interior containment, boundary exclusion and flap
    /// containment (flaps of width `delta / 2`).
    pub fn cheap_conclusions(&self, opts: &SweepOptions) -> Conclusions {
        let inst = &self.instance;
        let lambdas = self.lambda_samples(opts.lambdas, opts.seed);
        let mid = open_times(0.0, 1.0, opts.times);
        let interior = self.min_over(&lambdas, &mid, |x| inst.polytope.min_facet_value(x));
        let mut exclusion = f64::INFINITY;
        for i in 0..self.n() {
            let face = self.face_samples(i, opts.lambdas / 4, opts.seed);
            exclusion = exclusion.min(self.min_over(&face, &mid, |x| -inst.hat_margin(x)));
        }
        let half = 0.5 * self.paths.delta;
        let mut flap_times = open_times(-half, 0.0, opts.times / 5);
        flap_times.extend(open_times(1.0, 1.0 + half, opts.times / 5));
        let flaps = self.min_over(&lambdas, &flap_times, |x| inst.hat_margin(x));
        Conclusions { interior, exclusion, flaps, coverage_gap: None }
    }

    /// Coverage of the apex simplex by `F(Delta x [0,1])`.
    pub fn coverage(&self, n_targets: usize, seed: u64, opts: &CoverageOptions) -> Result<VerificationReport> {
        let hat = self.instance.hat_simplex()?;
        let mut targets = hat.sample(n_targets, seed, SampleMode::Interior)?;
        targets.extend(hat.vertices().iter().cloned());
        let domain = self.domain(0.0, 1.0)?;
        check_coverage_points(self, &domain, &targets, seed, opts)
    }

    pub fn conclusions(&self, sweep: &SweepOptions, n_targets: usize, cov: &CoverageOptions) -> Result<Conclusions> {
        let mut c = self.cheap_conclusions(sweep);
        if c.cheap_pass() {
            c.coverage_gap = self.coverage(n_targets, sweep.seed, cov)?.coverage_gap;
        }
        Ok(c)
    }

    /// Sampled Hausdorff distance between `F(Delta x {0})` and `sigma`.
    pub fn base_hausdorff(&self, k: usize) -> f64 {
        let lambdas = self.lambda_samples(k, 3);
        let image: Vec<Vec<f64>> = lambdas.iter().map(|l| self.eval(l, 0.0)).collect();
        let sigma: Vec<Vec<f64>> = lambdas.iter().map(|l| combine(l, &self.instance.sigma)).collect();
        let directed = |a: &[Vec<f64>], b: &[Vec<f64>]| {
            a.par_iter()
                .map(|x| b.iter().map(|y| dist(x, y)).fold(f64::INFINITY, f64::min))
                .reduce(|| 0.0, f64::max)
        };
        directed(&image, &sigma).max(directed(&sigma, &image))
    }

    /// `max |F(lambda, 1) - p|`.
    pub fn apex_error(&self, k: usize) -> f64 {
        self.lambda_samples(k, 3)
            .iter()
            .map(|l| dist(&self.eval(l, 1.0), &self.instance.apex))
            .fold(0.0, f64::max)
    }

    /// Everything the covering lemma asserts for this map, as one report.
    pub fn verify(&self, sweep: &SweepOptions, n_targets: usize, cov: &CoverageOptions) -> Result<VerificationReport> {
        let start = std::time::Instant::now();
        let mut r = VerificationReport::new("apex_cover", n_targets, sweep.seed)
            .tolerance("hausdorff", 1e-3)
            .tolerance("gap", cov.gap_tol);
        let c = self.conclusions(sweep, n_targets, cov)?;
        r.detail("interior_margin", c.interior);
        r.detail("exclusion_margin", c.exclusion);
        r.detail("flap_margin", c.flaps);
        let h = self.base_hausdorff(1000);
        r.detail("base_hausdorff", h);
        r.detail("apex_error", self.apex_error(100));
        r.coverage_gap = c.coverage_gap;
        r.passed = c.passed(cov.gap_tol) && h < 1e-3;
        if self.n() == 2 {
            match boundary_degree(self, None) {
                Ok(w) => {
                    r.winding = Some(w);
                    r.passed &= w == 1;
                }
                Err(e) => {
                    r.passed = false;
                    r.note(format!("boundary degree: {e}"));
                }
            }
        }
        r.worst_violation = if r.passed { 0.0 } else { 1.0 };
        Ok(r.timed(start))
    }
}

impl Mapping for CoverMap {
    fn domain_dim(&self) -> usize {
        self.n()
    }
    fn codomain_dim(&self) -> usize {
        self.n()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        Ok(self.eval(&CoverMap::lambda(&x[..n - 1]), x[n - 1]))
    }
}

/// Samples per edge of the domain square in [`boundary_degree`].
pub const EDGE_SAMPLES: usize = 2500;

/// Winding number around `z` (default: centroid of the apex simplex) of
/// `rho o F` on the boundary of `Delta_1 x [0,1]`, traversed so that the
/// image runs `v_1 -> v_2 -> p`; this is counter-clockwise for a positively
/// oriented instance and reversed otherwise.
pub fn boundary_degree(cover: &CoverMap, z: Option<&[f64]>) -> Result<i64> {
    if cover.n() != 2 {
        return Err(Error::Unsupported("boundary degree is planar".into()));
    }
    let inst = &cover.instance;
    let center = match z {
        Some(z) => z.to_vec(),
        None => {
            let mut v = inst.sigma.clone();
            v.push(inst.apex.clone());
            crate::linalg::centroid(&v)
        }
    };
    let rho = radial_retraction(&inst.hat_forms(), &center)?;
    let m = EDGE_SAMPLES;
    let s = |k: usize| k as f64 / m as f64;
    // (mu, t) with lambda = (1 - mu, mu)
    let mut domain_loop = Vec::with_capacity(4 * m);
    domain_loop.extend((0..m).map(|k| (s(k), 0.0)));
    domain_loop.extend((0..m).map(|k| (1.0, s(k))));
    domain_loop.extend((0..m).map(|k| (1.0 - s(k), 1.0)));
    domain_loop.extend((0..m).map(|k| (0.0, 1.0 - s(k))));
    let mut image = Vec::with_capacity(domain_loop.len());
    for (i, (mu, t)) in domain_loop.into_iter().enumerate() {
        let x = cover.eval(&[1.0 - mu, mu], t);
        let d = dist(&x, &center);
        if d <= crate::verify::winding::CENTER_TOL {
            return Err(Error::CenterHit { index: i, distance: d });
        }
        image.push(rho.retract(&x)?.0);
    }
    let w = winding_number(&image, &center)?;
    Ok(if orientation(&inst.sigma, &inst.apex) < 0.0 { -w } else { w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::build_apex_paths;

    fn unit() -> CoverMap {
        let inst = ApexInstance::unit_triangle();
        let paths = build_apex_paths(&inst).unwrap();
        CoverMap::new(inst, paths).unwrap()
    }

    #[test]
    fn base_and_apex_slices() {
        let f = unit();
        assert!(f.base_hausdorff(200) < 1e-12);
        assert!(f.apex_error(50) < 1e-12);
        let e1 = f.eval(&[1.0, 0.0], 0.3);
        assert_eq!(e1, f.paths.paths[0].eval(0.3));
    }

    #[test]
    fn degree_is_one() {
        assert_eq!(boundary_degree(&unit(), None).unwrap(), 1);
    }

    #[test]
    fn conclusions_hold_for_the_exact_map() {
        let c = unit().cheap_conclusions(&SweepOptions { lambdas: 21, times: 300, seed: 1 });
        assert!(c.cheap_pass(), "{c:?}");
    }

    #[test]
    fn jet_linearity() {
        let f = unit();
        for t0 in [0.0, 1.0] {
            for l in [[0.3, 0.7], [1.0, 0.0], [0.55, 0.45]] {
                let jf = f.jet(&l, t0, 3).unwrap();
                let ja: Vec<_> = f.paths.paths.iter().map(|p| p.jet(t0, 3).unwrap()).collect();
                for k in 0..=3 {
                    for c in 0..2 {
                        let direct = l[0] * ja[0].derivatives[k][c] + l[1] * ja[1].derivatives[k][c];
                        assert!((jf.derivatives[k][c] - direct).abs() < 1e-10);
                    }
                }
            }
        }
    }
}
