//! Empirical robustness radius of a cover map under jet-preserving
//! perturbations of its paths.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::map::{CoverMap, SweepOptions};
use crate::error::Result;
use crate::models::region::stream_rng;
use crate::pathfit::{ChebSeries, Curve, FlatTerm};
use crate::verify::CoverageOptions;

/// Order of vanishing of the perturbations at `t = 0` and `t = 1`.
pub const FLAT_POWER: u32 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessOptions {
    pub directions: usize,
    pub seed: u64,
    /// Smallest magnitude tried.
    pub start: f64,
    pub max_doublings: usize,
    pub bisections: usize,
    pub targets: usize,
    pub sweep: SweepOptions,
    pub coverage: CoverageOptions,
    /// Full-density checks the final radius must also pass.
    pub confirm_targets: usize,
    pub confirm_sweep: SweepOptions,
    pub confirm_coverage: CoverageOptions,
}

impl Default for RobustnessOptions {
    fn default() -> Self {
        RobustnessOptions {
            directions: 20,
            seed: 17,
            start: 1e-4,
            max_doublings: 30,
            bisections: 6,
            targets: 300,
            sweep: SweepOptions { lambdas: 16, times: 200, seed: 7 },
            coverage: CoverageOptions { net_size: 1024, refine_steps: 100, ..CoverageOptions::default() },
            confirm_targets: 1000,
            confirm_sweep: SweepOptions::default(),
            confirm_coverage: CoverageOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Robustness {
    /// Largest magnitude at which every direction kept every conclusion.
    pub radius: f64,
    /// Smallest magnitude seen to fail, if any.
    pub failing: Option<f64>,
    /// Magnitudes tried, in order, with their outcome.
    pub trials: Vec<(f64, bool)>,
    /// Whether the radius passed the full-density checks.
    pub confirmed: bool,
}

/// One perturbation direction: for each path a vector-valued
/// `t^4 (t - 1)^4 c(t)` with `c` a random cubic, scaled to unit sup norm
/// over the path domain.
pub fn perturbation_direction(cover: &CoverMap, seed: u64, index: usize) -> Vec<Curve> {
    let n = cover.n();
    let (a, b) = cover.paths.domain();
    let mut rng = stream_rng(seed, 1000 + index as u64);
    let mut dirs: Vec<FlatTerm> = (0..n)
        .map(|_| FlatTerm {
            anchors: vec![0.0, 1.0],
            power: FLAT_POWER,
            scale: 1.0,
            factor: ChebSeries {
                a,
                b,
                coeffs: (0..4).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect(),
            },
        })
        .collect();
    let sup = dirs
        .iter()
        .map(|d| {
            (0..=2000)
                .map(|k| crate::linalg::norm(&d.eval_generic(&(a + (b - a) * k as f64 / 2000.0))))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    for d in &mut dirs {
        d.scale = 1.0 / sup;
    }
    dirs.into_iter().map(Curve::Flat).collect()
}

/// `alpha_i + s d_i` for every path.
pub fn perturbed(cover: &CoverMap, direction: &[Curve], s: f64) -> CoverMap {
    let paths = cover
        .paths
        .paths
        .iter()
        .zip(direction)
        .map(|(p, d)| {
            let mut d = d.clone();
            if let Curve::Flat(f) = &mut d {
                f.scale *= s;
            }
            Curve::Sum { parts: vec![p.clone(), d] }
        })
        .collect();
    CoverMap { instance: cover.instance.clone(), paths: cover.paths.with_paths(paths) }
}

/// Whether every direction at magnitude `s` keeps all conclusions; the
/// cheap sweeps run over all directions before any coverage check.
pub fn conclusions_hold(cover: &CoverMap, directions: &[Vec<Curve>], s: f64, opts: &RobustnessOptions) -> Result<bool> {
    let maps: Vec<CoverMap> = directions.iter().map(|d| perturbed(cover, d, s)).collect();
    if !maps.iter().all(|g| g.cheap_conclusions(&opts.sweep).cheap_pass()) {
        return Ok(false);
    }
    for g in &maps {
        let gap = g.coverage(opts.targets, opts.sweep.seed, &opts.coverage)?.coverage_gap;
        if !gap.is_some_and(|v| v < opts.coverage.gap_tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Same options with the full-density checks in place of the search ones.
fn confirming(opts: &RobustnessOptions) -> RobustnessOptions {
    RobustnessOptions {
        targets: opts.confirm_targets,
        sweep: opts.confirm_sweep.clone(),
        coverage: opts.confirm_coverage.clone(),
        ..opts.clone()
    }
}

/// Doubling from `opts.start` until a failure, then bisection, both with
/// light sampling; the result is then halved until it passes the
/// full-density checks. Zero when the smallest magnitude already fails.
pub fn robustness_radius(cover: &CoverMap, opts: &RobustnessOptions) -> Result<Robustness> {
    let directions: Vec<Vec<Curve>> = (0..opts.directions)
        .map(|k| perturbation_direction(cover, opts.seed, k))
        .collect();
    let mut trials = Vec::new();
    let mut test = |s: f64| -> Result<bool> {
        let ok = conclusions_hold(cover, &directions, s, opts)?;
        trials.push((s, ok));
        Ok(ok)
    };
    if !test(opts.start)? {
        return Ok(Robustness { radius: 0.0, failing: Some(opts.start), trials, confirmed: false });
    }
    let mut lo = opts.start;
    let mut hi = None;
    for _ in 0..opts.max_doublings {
        let s = 2.0 * lo;
        if test(s)? {
            lo = s;
        } else {
            hi = Some(s);
            break;
        }
    }
    if let Some(mut h) = hi {
        for _ in 0..opts.bisections {
            let mid = 0.5 * (lo + h);
            if test(mid)? {
                lo = mid;
            } else {
                h = mid;
            }
        }
        hi = Some(h);
    }
    let full = confirming(opts);
    while lo >= opts.start {
        if conclusions_hold(cover, &directions, lo, &full)? {
            return Ok(Robustness { radius: lo, failing: hi, trials, confirmed: true });
        }
        hi = Some(lo);
        lo *= 0.5;
    }
    Ok(Robustness { radius: 0.0, failing: hi, trials, confirmed: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{build_apex_paths, ApexInstance};

    fn cover() -> CoverMap {
        let inst = ApexInstance::unit_triangle();
        let paths = build_apex_paths(&inst).unwrap();
        CoverMap::new(inst, paths).unwrap()
    }

    #[test]
    fn perturbations_keep_jets() {
        let f = cover();
        let d = perturbation_direction(&f, 3, 0);
        let g = perturbed(&f, &d, 0.3);
        for (p, q) in f.paths.paths.iter().zip(&g.paths.paths) {
            for t in [0.0, 1.0] {
                assert!(p.jet(t, 3).unwrap().residual(&q.jet(t, 3).unwrap()) < 1e-12);
            }
            assert!(crate::linalg::dist(&p.eval(0.5), &q.eval(0.5)) > 0.0);
        }
    }

    #[test]
    fn radius_brackets_failure() {
        let f = cover();
        let opts = RobustnessOptions {
            directions: 4,
            confirm_targets: 300,
            confirm_sweep: SweepOptions { lambdas: 16, times: 400, seed: 7 },
            ..RobustnessOptions::default()
        };
        assert!(conclusions_hold(&f, &[], 0.0, &opts).unwrap());
        let r = robustness_radius(&f, &opts).unwrap();
        assert!(r.radius > 0.0 && r.confirmed);
        let dirs: Vec<_> = (0..4).map(|k| perturbation_direction(&f, opts.seed, k)).collect();
        assert!(!conclusions_hold(&f, &dirs, 10.0 * r.radius, &opts).unwrap());
    }
}
