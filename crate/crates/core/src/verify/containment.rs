//! Sampled image containment.

use std::time::Instant;

use rayon::prelude::*;

use super::report::VerificationReport;
use crate::error::{Error, Result};
use crate::models::{Region, SampleMode};
use crate::polycore::Mapping;

/// Index and value of the largest entry; ties go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> Option<(usize, f64)> {
    values
        .par_iter()
        .copied()
        .enumerate()
        .reduce_with(|a, b| {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) || a.1.is_nan() {
                b
            } else {
                a
            }
        })
}

/// Samples `domain`, maps, and checks membership of every image in `target`
/// up to `tol` on the defining residual.
pub fn check_containment(
    map: &dyn Mapping,
    domain: &dyn Region,
    target: &dyn Region,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if map.domain_dim() != domain.dim() {
        return Err(Error::dim("map domain", domain.dim(), map.domain_dim()));
    }
    if map.codomain_dim() != target.dim() {
        return Err(Error::dim("map codomain", target.dim(), map.codomain_dim()));
    }
    let points = domain.sample(n, seed, SampleMode::Interior)?;
    check_points(map, &points, target, seed, tol).map(|r| r.timed(start))
}

/// Containment on explicit domain points.
pub fn check_points(
    map: &dyn Mapping,
    points: &[Vec<f64>],
    target: &dyn Region,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let residuals: Vec<f64> = points
        .par_iter()
        .map(|x| match map.apply(x) {
            Ok(y) => target.residual(&y),
            Err(_) => f64::INFINITY,
        })
        .collect();
    let failures = residuals.iter().filter(|r| !(**r <= tol)).count();
    let errors = residuals.iter().filter(|r| r.is_infinite()).count();
    let mut report = VerificationReport::new("containment", points.len(), seed).tolerance("residual", tol);
    if let Some((i, worst)) = argmax(&residuals) {
        report.worst_violation = worst;
        report.witness = Some(points[i].clone());
    }
    report.detail("failures", failures as f64);
    if errors > 0 {
        report.note(format!("{errors} samples failed to evaluate"));
    }
    report.passed = failures == 0;
    Ok(report.timed(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::SemialgebraicSet;
    use crate::polycore::MapExpr;

    #[test]
    fn identity_and_scaling_on_disc() {
        let disc = SemialgebraicSet::ball(&[0.0, 0.0], 1.0);
        let id = MapExpr::identity(2);
        let r = check_containment(&id, &disc, &disc, 2000, 3, 1e-12).unwrap();
        assert!(r.passed);
        assert_eq!(r.worst_violation, 0.0);
        let double = MapExpr::affine(vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![0.0, 0.0]).unwrap();
        let r = check_containment(&double, &disc, &disc, 2000, 3, 1e-12).unwrap();
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert!(crate::linalg::norm(&w) > 0.95);
    }
}
