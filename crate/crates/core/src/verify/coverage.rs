//! Sampled surjectivity: every target point is approached by the image.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::containment::argmax;
use super::report::VerificationReport;
use crate::error::{Error, Result};
use crate::linalg::{dist, norm};
use crate::models::{Region, SampleMode};
use crate::polycore::Mapping;

/// Seed offset separating the domain net from the target samples.
const NET_STREAM: u64 = 0x9e37_79b9;
/// Net sizes are rounded up to `BASE_NET * 2^k`.
const BASE_NET: usize = 256;
/// Smallest prefix whose best point seeds a refinement.
const MIN_PREFIX: usize = 64;
/// Upper bound on the number of domain cells used to diversify starts.
const MAX_CELLS: usize = 64;
/// Cells whose best points seed refinements, per prefix.
const CELL_STARTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageOptions {
    pub net_size: usize,
    pub refine_steps: usize,
    pub gap_tol: f64,
    /// Membership slack when keeping refinement iterates in the domain.
    pub domain_tol: f64,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        CoverageOptions {
            net_size: 20_000,
            refine_steps: 200,
            gap_tol: 1e-3,
            domain_tol: 1e-12,
        }
    }
}

/// Requested net sizes are rounded up to `BASE_NET * 2^k`, so a larger
/// request yields a net (and a set of refinement starts) containing the
/// smaller one.
pub fn effective_net_size(n: usize) -> usize {
    let mut m = BASE_NET;
    while m < n {
        m *= 2;
    }
    m
}

/// Domain points and their images; failed evaluations map to `None`.
pub struct ImageNet {
    pub points: Vec<Vec<f64>>,
    pub images: Vec<Option<Vec<f64>>>,
    /// `(offset, len)` of the interior, boundary and extreme-point blocks.
    blocks: Vec<(usize, usize)>,
    /// Coarse bounding-box cell of each point.
    cells: Vec<usize>,
    n_cells: usize,
}

/// Cell indices on a grid of `g^d <= MAX_CELLS` boxes over `bbox`.
fn cell_indices(points: &[Vec<f64>], bbox: Option<(Vec<f64>, Vec<f64>)>) -> (Vec<usize>, usize) {
    let Some((lo, hi)) = bbox else {
        return (vec![0; points.len()], 1);
    };
    let d = lo.len().max(1);
    let mut g = 1usize;
    while (g + 1).pow(d as u32) <= MAX_CELLS {
        g += 1;
    }
    let index = |x: &[f64]| {
        let mut c = 0;
        for j in 0..lo.len() {
            let w = hi[j] - lo[j];
            let k = if w > 0.0 { ((x[j] - lo[j]) / w * g as f64).floor() as i64 } else { 0 };
            c = c * g + k.clamp(0, g as i64 - 1) as usize;
        }
        c
    };
    (points.iter().map(|x| index(x)).collect(), g.pow(lo.len() as u32))
}

impl ImageNet {
    /// Prefix-stable interior samples, then boundary samples, then extreme
    /// points.
    pub fn build(map: &dyn Mapping, domain: &dyn Region, n: usize, seed: u64) -> Result<Self> {
        let n = effective_net_size(n);
        let mut points = domain.sample(n, seed ^ NET_STREAM, SampleMode::Interior)?;
        let mut blocks = vec![(0, points.len())];
        if let Ok(b) = domain.sample(n / 4, seed ^ NET_STREAM ^ 1, SampleMode::Boundary) {
            blocks.push((points.len(), b.len()));
            points.extend(b);
        }
        let ext = domain.extreme_points();
        blocks.push((points.len(), ext.len()));
        points.extend(ext);
        let images = points.par_iter().map(|x| map.apply(x).ok()).collect();
        let (cells, n_cells) = cell_indices(&points, domain.bbox());
        Ok(ImageNet { points, images, blocks, cells, n_cells })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Refinement starts: within each prefix of length `len / 2^j` of every
    /// block, the nearest point and the nearest points of the `CELL_STARTS`
    /// domain cells that come closest, so that a fold of the map does not
    /// trap every start on one branch. A prefix yields the same
    /// starts in any larger net, so more points never lose a start.
    fn starts(&self, y: &[f64]) -> Vec<usize> {
        let mut starts = Vec::new();
        for &(offset, len) in &self.blocks {
            let mut cuts = vec![len];
            while cuts[cuts.len() - 1] / 2 >= MIN_PREFIX {
                let c = cuts[cuts.len() - 1] / 2;
                cuts.push(c);
            }
            cuts.reverse();
            let mut best: Option<(usize, f64)> = None;
            let mut per_cell: Vec<Option<(usize, f64)>> = vec![None; self.n_cells];
            let mut next = 0;
            for i in 0..len {
                if let Some(img) = &self.images[offset + i] {
                    let d = dist(img, y);
                    if best.is_none_or(|(_, b)| d < b) {
                        best = Some((offset + i, d));
                    }
                    let cell = &mut per_cell[self.cells[offset + i]];
                    if cell.is_none_or(|(_, b)| d < b) {
                        *cell = Some((offset + i, d));
                    }
                }
                if next < cuts.len() && i + 1 == cuts[next] {
                    if let Some((j, _)) = best {
                        starts.push(j);
                        let mut cells: Vec<(usize, f64)> = per_cell.iter().flatten().copied().collect();
                        cells.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                        starts.extend(cells.iter().take(CELL_STARTS).map(|(k, _)| *k));
                    }
                    next += 1;
                }
            }
        }
        starts.sort_unstable();
        starts.dedup();
        starts
    }
}

/// Refinement stops once the distance is below this, relative to `1 + |y|`.
const CONVERGED: f64 = 1e-14;

/// Keeps `c` in the domain, projecting when it strays.
fn admissible(domain: &dyn Region, c: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    if domain.contains(&c, tol) {
        return Some(c);
    }
    domain.project(&c).filter(|p| domain.contains(p, tol))
}

/// One damped Gauss-Newton step from `x` with a forward-difference
/// Jacobian; `None` when the step does not decrease the distance.
fn gauss_newton(
    map: &dyn Mapping,
    domain: &dyn Region,
    y: &[f64],
    x: &[f64],
    img: &[f64],
    fx: f64,
    mu: &mut f64,
    tol: f64,
) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let d = x.len();
    let m = img.len();
    let mut jac = DMatrix::zeros(m, d);
    for i in 0..d {
        let h = 1e-7 * x[i].abs().max(1.0);
        let mut c = x.to_vec();
        c[i] += h;
        let (c, h) = if domain.contains(&c, tol) {
            (c, h)
        } else {
            c[i] = x[i] - h;
            (c, -h)
        };
        let fc = map.apply(&c).ok()?;
        for k in 0..m {
            jac[(k, i)] = (fc[k] - img[k]) / h;
        }
    }
    let r = DVector::from_iterator(m, img.iter().zip(y).map(|(a, b)| a - b));
    let jtj = jac.transpose() * &jac;
    let mut lhs = jtj.clone();
    for i in 0..d {
        lhs[(i, i)] += *mu * jtj[(i, i)].max(1e-12);
    }
    let step = lhs.lu().solve(&(-(jac.transpose() * r)))?;
    let c: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + s).collect();
    let c = admissible(domain, c, tol)?;
    let ic = map.apply(&c).ok()?;
    let fc = dist(&ic, y);
    if fc < fx {
        *mu = (*mu / 3.0).max(1e-12);
        Some((c, ic, fc))
    } else {
        *mu = (*mu * 4.0).min(1e12);
        None
    }
}

/// Descent on `|map(x) - y|` kept inside `domain`: a damped Gauss-Newton
/// step when it helps, a compass poll otherwise.
fn refine(
    map: &dyn Mapping,
    domain: &dyn Region,
    y: &[f64],
    x0: &[f64],
    f0: f64,
    step0: f64,
    steps: usize,
    tol: f64,
) -> f64 {
    let d = x0.len();
    let mut x = x0.to_vec();
    let Ok(mut img) = map.apply(&x) else {
        return f0;
    };
    let mut fx = f0;
    let mut step = step0;
    let mut mu = 1e-3;
    let floor = step0 * 1e-12;
    let done = CONVERGED * (1.0 + norm(y));
    for _ in 0..steps {
        if fx <= done || step < floor {
            break;
        }
        if let Some((c, ic, fc)) = gauss_newton(map, domain, y, &x, &img, fx, &mut mu, tol) {
            (x, img, fx) = (c, ic, fc);
            continue;
        }
        let mut moved = false;
        'dirs: for i in 0..d {
            for sgn in [1.0, -1.0] {
                let mut c = x.clone();
                c[i] += sgn * step;
                let Some(c) = admissible(domain, c, tol) else {
                    continue;
                };
                if let Ok(ic) = map.apply(&c) {
                    let fc = dist(&ic, y);
                    if fc < fx {
                        (x, img, fx) = (c, ic, fc);
                        moved = true;
                        break 'dirs;
                    }
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    fx
}

/// Achieved distance for each target.
pub fn coverage_gaps(
    map: &dyn Mapping,
    domain: &dyn Region,
    net: &ImageNet,
    targets: &[Vec<f64>],
    opts: &CoverageOptions,
) -> Vec<f64> {
    let diag = domain
        .bbox()
        .map(|(lo, hi)| dist(&lo, &hi))
        .unwrap_or(1.0)
        .max(f64::MIN_POSITIVE);
    // independent of the net size, so refinements from shared starts agree
    let step0 = diag / 64.0;
    targets
        .par_iter()
        .map(|y| {
            // best start first; stop once a refinement has converged, since
            // the remaining starts could only gain less than that
            let mut starts: Vec<(usize, f64)> = net
                .starts(y)
                .into_iter()
                .map(|i| (i, dist(net.images[i].as_ref().expect("start has an image"), y)))
                .collect();
            starts.sort_by(|a, b| a.1.total_cmp(&b.1));
            let done = CONVERGED * (1.0 + norm(y));
            let mut best = f64::INFINITY;
            for (i, f0) in starts {
                best = best.min(refine(map, domain, y, &net.points[i], f0, step0, opts.refine_steps, opts.domain_tol));
                if best <= done {
                    break;
                }
            }
            best
        })
        .collect()
}

/// Coverage of explicit target points by the image of `domain`.
pub fn check_coverage_points(
    map: &dyn Mapping,
    domain: &dyn Region,
    targets: &[Vec<f64>],
    seed: u64,
    opts: &CoverageOptions,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if map.domain_dim() != domain.dim() {
        return Err(Error::dim("map domain", domain.dim(), map.domain_dim()));
    }
    if let Some(t) = targets.iter().find(|t| t.len() != map.codomain_dim()) {
        return Err(Error::dim("coverage target", map.codomain_dim(), t.len()));
    }
    let net = ImageNet::build(map, domain, opts.net_size, seed)?;
    let gaps = coverage_gaps(map, domain, &net, targets, opts);
    let mut report = VerificationReport::new("coverage", targets.len(), seed)
        .tolerance("gap", opts.gap_tol);
    report.detail("net_size", net.len() as f64);
    report.detail("refine_steps", opts.refine_steps as f64);
    let unresolved = gaps.iter().filter(|g| !g.is_finite()).count();
    if unresolved > 0 {
        report.note(format!("{unresolved} targets had no evaluable start"));
    }
    let failures = gaps.iter().filter(|g| !(**g < opts.gap_tol)).count();
    report.detail("failures", failures as f64);
    if let Some((i, g)) = argmax(&gaps) {
        report.coverage_gap = Some(g);
        report.worst_violation = g;
        report.witness = Some(targets[i].clone());
    }
    let errors = net.images.iter().filter(|i| i.is_none()).count();
    if errors > 0 {
        report.note(format!("{errors} net points failed to evaluate"));
    }
    report.passed = failures == 0;
    Ok(report.timed(start))
}

/// Samples `n_targets` points of `target` (plus its extreme points) and
/// checks that each is within `gap_tol` of the refined image of `domain`.
pub fn check_coverage(
    map: &dyn Mapping,
    domain: &dyn Region,
    target: &dyn Region,
    n_targets: usize,
    seed: u64,
    opts: &CoverageOptions,
) -> Result<VerificationReport> {
    if target.bbox().is_none() {
        return Err(Error::Precondition("coverage target must be bounded".into()));
    }
    let mut targets = target.sample(n_targets, seed, SampleMode::Interior)?;
    targets.extend(target.extreme_points());
    check_coverage_points(map, domain, &targets, seed, opts)
}

/// Points on the unit circle at `k` equal angular steps.
pub fn circle_targets(k: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..k)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / k as f64;
            vec![radius * a.cos(), radius * a.sin()]
        })
        .collect()
}

/// Largest distance from a point of `points` to the unit sphere.
pub fn sphere_residual(points: &[Vec<f64>]) -> f64 {
    points.iter().map(|p| (norm(p) - 1.0).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::SemialgebraicSet;
    use crate::polycore::MapExpr;

    fn opts() -> CoverageOptions {
        CoverageOptions { net_size: 4000, refine_steps: 100, ..Default::default() }
    }

    #[test]
    fn identity_covers_disc() {
        let disc = SemialgebraicSet::ball(&[0.0, 0.0], 1.0);
        let r = check_coverage(&MapExpr::identity(2), &disc, &disc, 300, 5, &opts()).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert!(r.coverage_gap.unwrap() < 1e-9);
    }

    #[test]
    fn half_scaling_misses_by_half() {
        let disc = SemialgebraicSet::ball(&[0.0, 0.0], 1.0);
        let half = MapExpr::affine(vec![vec![0.5, 0.0], vec![0.0, 0.5]], vec![0.0, 0.0]).unwrap();
        let targets = circle_targets(36, 1.0);
        let r = check_coverage_points(&half, &disc, &targets, 5, &opts()).unwrap();
        assert!(!r.passed);
        assert!((r.coverage_gap.unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn larger_nets_never_increase_the_gap() {
        let disc = SemialgebraicSet::ball(&[0.0, 0.0], 1.0);
        let sq = crate::squeeze::complex_square().unwrap();
        let targets = disc.sample(100, 9, SampleMode::Interior).unwrap();
        let mut o = opts();
        o.refine_steps = 10;
        let small = check_coverage_points(&sq, &disc, &targets, 1, &o).unwrap();
        o.net_size *= 2;
        let big = check_coverage_points(&sq, &disc, &targets, 1, &o).unwrap();
        o.refine_steps *= 2;
        let bigger = check_coverage_points(&sq, &disc, &targets, 1, &o).unwrap();
        assert!(big.coverage_gap.unwrap() <= small.coverage_gap.unwrap() + 1e-12);
        assert!(bigger.coverage_gap.unwrap() <= big.coverage_gap.unwrap() + 1e-12);
    }
}
