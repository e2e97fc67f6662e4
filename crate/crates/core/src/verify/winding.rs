//! Winding numbers of sampled planar loops.

use crate::error::{Error, Result};

/// Closeness to the center that invalidates a loop.
pub const CENTER_TOL: f64 = 1e-9;
/// Largest admissible angular step between consecutive samples.
pub const MAX_STEP: f64 = std::f64::consts::FRAC_PI_2;

/// Accumulated angle of the closed loop `points` around `center`, in turns,
/// rounded. The loop closes from the last sample back to the first.
pub fn winding_number(points: &[Vec<f64>], center: &[f64]) -> Result<i64> {
    if points.len() < 3 {
        return Err(Error::InvalidInput("loop needs at least three samples".into()));
    }
    if center.len() != 2 {
        return Err(Error::dim("winding center", 2, center.len()));
    }
    let mut angles = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if p.len() != 2 {
            return Err(Error::dim("loop sample", 2, p.len()));
        }
        let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
        let r = dx.hypot(dy);
        if !(r > CENTER_TOL) {
            return Err(Error::CenterHit { index: i, distance: r });
        }
        angles.push(dy.atan2(dx));
    }
    let mut total = 0.0;
    for i in 0..angles.len() {
        let next = angles[(i + 1) % angles.len()];
        let mut step = next - angles[i];
        step -= std::f64::consts::TAU * (step / std::f64::consts::TAU).round();
        if step.abs() >= MAX_STEP {
            return Err(Error::StepTooLarge { index: i, step });
        }
        total += step;
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() >= 0.01 {
        return Err(Error::WindingResidual(turns - rounded));
    }
    Ok(rounded as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::coverage::circle_targets;

    #[test]
    fn circles() {
        let c = circle_targets(360, 1.0);
        assert_eq!(winding_number(&c, &[0.0, 0.0]).unwrap(), 1);
        let twice: Vec<_> = c.iter().chain(&c).cloned().collect();
        assert_eq!(winding_number(&twice, &[0.0, 0.0]).unwrap(), 2);
        let rev: Vec<_> = c.iter().rev().cloned().collect();
        assert_eq!(winding_number(&rev, &[0.0, 0.0]).unwrap(), -1);
        assert_eq!(winding_number(&c, &[3.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn constant_loop_away_from_center() {
        let c = vec![vec![2.0, 2.0]; 10];
        assert_eq!(winding_number(&c, &[0.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn errors() {
        let c = circle_targets(360, 1.0);
        assert!(matches!(winding_number(&c, &[1.0, 0.0]), Err(Error::CenterHit { .. })));
        let sparse = circle_targets(3, 1.0);
        assert!(matches!(winding_number(&sparse, &[0.0, 0.0]), Err(Error::StepTooLarge { .. })));
    }
}
