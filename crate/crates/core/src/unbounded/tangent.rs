//! A regular map onto the closed unit ball from any set containing a small
//! flat disc: project to the disc's plane, rescale, then apply the ball
//! double cover.

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::models::{Region, SampleMode, SemialgebraicSet};
use crate::polycore::{compose, MapExpr};
use crate::squeeze::ball_double_cover;
use crate::verify::{check_coverage_points, CoverageOptions, VerificationReport};

/// Largest tolerated deviation of the frame's Gram matrix from the identity.
pub const GRAM_TOL: f64 = 1e-10;

fn check_frame(m: usize, point: &[f64], frame: &[Vec<f64>]) -> Result<()> {
    if point.len() != m {
        return Err(Error::dim("tangent point", m, point.len()));
    }
    if frame.is_empty() || frame.len() > m {
        return Err(Error::Degenerate(format!("frame of {} vectors in R^{m}", frame.len())));
    }
    if let Some(v) = frame.iter().find(|v| v.len() != m) {
        return Err(Error::dim("frame vector", m, v.len()));
    }
    let mut worst: f64 = 0.0;
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(a, b) - target).abs());
        }
    }
    if !(worst < GRAM_TOL) {
        return Err(Error::Degenerate(format!("frame is not orthonormal (Gram residual {worst:e})")));
    }
    Ok(())
}

/// Orthogonal projection of `R^m` onto `point + span(frame)`.
pub fn tangent_projection(point: &[f64], frame: &[Vec<f64>]) -> Result<MapExpr> {
    let m = point.len();
    check_frame(m, point, frame)?;
    let matrix: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| frame.iter().map(|v| v[i] * v[j]).sum()).collect())
        .collect();
    // x -> p + P (x - p)
    let offset = (0..m)
        .map(|i| point[i] - (0..m).map(|j| matrix[i][j] * point[j]).sum::<f64>())
        .collect();
    MapExpr::affine(matrix, offset)
}

/// `R^m -> R^d`: projection onto the plane, the isometry onto `R^d` scaled
/// by `1 / eps`, then `x -> 2x / (1 + |x|^2)`.
pub fn tangent_cover(m: usize, d: usize, point: &[f64], frame: &[Vec<f64>], eps: f64) -> Result<MapExpr> {
    check_frame(m, point, frame)?;
    if frame.len() != d {
        return Err(Error::dim("frame size", d, frame.len()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("disc radius must be positive, got {eps}")));
    }
    let chart = MapExpr::affine(
        frame.iter().map(|v| v.iter().map(|c| c / eps).collect()).collect(),
        frame.iter().map(|v| -dot(v, point) / eps).collect(),
    )?;
    MapExpr::composition(vec![ball_double_cover(d)?, chart, tangent_projection(point, frame)?])
}

/// Coverage of the closed unit ball by the image of the disc of radius
/// `eps` around `point` in its tangent plane.
pub fn certify_tangent_cover(
    map: &MapExpr,
    point: &[f64],
    frame: &[Vec<f64>],
    eps: f64,
    n_targets: usize,
    seed: u64,
    opts: &CoverageOptions,
) -> Result<VerificationReport> {
    let m = point.len();
    let d = frame.len();
    // the disc, parametrized by the unit ball of R^d
    let disc = MapExpr::affine(
        (0..m).map(|i| frame.iter().map(|v| eps * v[i]).collect()).collect(),
        point.to_vec(),
    )?;
    let on_disc = compose(map, &disc)?;
    let ball = SemialgebraicSet::ball(&vec![0.0; d], 1.0);
    let mut targets = ball.sample(n_targets, seed, SampleMode::Interior)?;
    targets.extend(ball.sample(n_targets / 4, seed, SampleMode::Boundary)?);
    let mut r = check_coverage_points(&on_disc, &ball, &targets, seed, opts)?;
    r.check = "tangent_cover".into();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_frame_is_the_double_cover() {
        let frame = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let g = tangent_cover(2, 2, &[0.0, 0.0], &frame, 1.0).unwrap();
        let b = ball_double_cover(2).unwrap();
        for x in [[0.3, -0.7], [2.0, 1.0], [0.0, 0.0]] {
            assert_eq!(g.eval(&x).unwrap(), b.eval(&x).unwrap());
        }
    }

    #[test]
    fn off_plane_points_map_like_their_projections() {
        let s = 0.5f64.sqrt();
        let frame = vec![vec![s, s, 0.0]];
        let p = [1.0, 2.0, 3.0];
        let g = tangent_cover(3, 1, &p, &frame, 0.5).unwrap();
        let pr = tangent_projection(&p, &frame).unwrap();
        let x = [0.4, -1.0, 7.0];
        let y = g.eval(&x).unwrap();
        let z = g.eval(&pr.eval(&x).unwrap()).unwrap();
        assert!((y[0] - z[0]).abs() < 1e-12);
    }

    #[test]
    fn rejects_a_non_orthonormal_frame() {
        let frame = vec![vec![1.0, 0.0, 0.0], vec![0.1, 1.0, 0.0]];
        assert!(matches!(tangent_cover(3, 2, &[0.0; 3], &frame, 1.0), Err(Error::Degenerate(_))));
    }
}
