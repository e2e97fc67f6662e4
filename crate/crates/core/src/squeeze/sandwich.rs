//! Squeezes of sets pinched between the unit ball and a larger ball.

use serde::{Deserialize, Serialize};

use super::radial::{radial_poly, ExponentRule, RadialSqueeze, PROFILE_TOL};
use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::models::{hypercube, prism, solid_simplex, ConvexPolytope};
use crate::polycore::{compose, MapExpr};

/// Number of `R^2 + 1` escalations tried with the flat exponent rule.
pub const MAX_ESCALATIONS: u32 = 4;

/// Inscribed radii below this are degenerate.
pub const MIN_INRADIUS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichCertificate {
    pub d: usize,
    /// `A(x) = (x - c) / r`.
    pub affine: MapExpr,
    pub center: Vec<f64>,
    pub inradius: f64,
    /// Smallest integer `>= max |A(v)|^2` (at least 2).
    pub outer_r2: u32,
    pub witnesses: Vec<Vec<f64>>,
}

impl SandwichCertificate {
    pub fn outer_radius(&self) -> f64 {
        (self.outer_r2 as f64).sqrt()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.affine.eval(x).expect("affine maps are total")
    }
}

/// One profile certification attempt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileAttempt {
    pub r2: u32,
    pub rule: ExponentRule,
    pub profile_max: f64,
    pub accepted: bool,
}

/// A certified map from a model onto the closed unit ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallMap {
    pub map: MapExpr,
    pub certificate: Option<SandwichCertificate>,
    pub squeeze: Option<RadialSqueeze>,
    pub attempts: Vec<ProfileAttempt>,
}

/// Finds a squeeze whose radial profile stays below 1 on `[0, R]`.
///
/// The flat rule is tried first with `R^2, R^2 + 1, ...`; its profile has
/// slope 1 at `r = 1`, so these attempts are recorded and then superseded
/// by the balanced rule at the smallest odd `R^2` not below the bound.
pub fn certify_squeeze(r2: u32) -> Result<(RadialSqueeze, Vec<ProfileAttempt>)> {
    let r2 = r2.max(2);
    let mut attempts = Vec::new();
    for k in 0..=MAX_ESCALATIONS {
        let s = radial_poly(r2 + k)?;
        let (m, _) = s.profile_max();
        let ok = m <= 1.0 + PROFILE_TOL;
        attempts.push(ProfileAttempt {
            r2: r2 + k,
            rule: ExponentRule::Flat,
            profile_max: m,
            accepted: ok,
        });
        if ok {
            return Ok((s, attempts));
        }
    }
    let odd = if r2 % 2 == 1 { r2 } else { r2 + 1 };
    let s = RadialSqueeze::new(odd, ExponentRule::Balanced)?;
    let (m, _) = s.profile_max();
    let ok = m <= 1.0 + PROFILE_TOL;
    attempts.push(ProfileAttempt {
        r2: odd,
        rule: ExponentRule::Balanced,
        profile_max: m,
        accepted: ok,
    });
    if !ok {
        return Err(Error::Degenerate(format!(
            "no radial squeeze certified for R^2 = {r2} (profile max {m})"
        )));
    }
    Ok((s, attempts))
}

fn scaled_affine(center: &[f64], r: f64) -> Result<MapExpr> {
    let d = center.len();
    let matrix = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 / r } else { 0.0 }).collect())
        .collect();
    MapExpr::affine(matrix, center.iter().map(|c| -c / r).collect())
}

fn ceil_r2(max_sq: f64) -> u32 {
    // guard against values like 2.0000000000000004 from rounding
    let c = (max_sq - 1e-12).ceil();
    (c as u32).max(2)
}

fn finish(cert: SandwichCertificate, r2_bound: u32) -> Result<BallMap> {
    let (squeeze, attempts) = certify_squeeze(r2_bound)?;
    let g = squeeze.map(cert.d)?;
    let map = compose(&g, &cert.affine)?;
    Ok(BallMap {
        map,
        certificate: Some(cert),
        squeeze: Some(squeeze),
        attempts,
    })
}

/// `g o A` for a full-dimensional polytope, `A` normalizing its Chebyshev
/// ball to the unit ball.
pub fn sandwich_squeeze(k: &ConvexPolytope) -> Result<BallMap> {
    let d = k.dim();
    let (center, r) = k.chebyshev_center()?;
    if r < MIN_INRADIUS {
        return Err(Error::Degenerate(format!("inscribed radius {r:e} is too small")));
    }
    let affine = scaled_affine(&center, r)?;
    let images: Vec<f64> = k
        .vertices()
        .iter()
        .map(|v| norm2(&affine.eval(v).expect("affine")))
        .collect();
    let max_sq = images.iter().cloned().fold(0.0, f64::max);
    let witnesses = k
        .vertices()
        .iter()
        .zip(&images)
        .filter(|(_, s)| **s >= max_sq * (1.0 - 1e-12))
        .map(|(v, _)| v.clone())
        .collect();
    let outer_r2 = ceil_r2(max_sq);
    let cert = SandwichCertificate {
        d,
        affine,
        center,
        inradius: r,
        outer_r2,
        witnesses,
    };
    finish(cert, outer_r2)
}

/// Affine map of `[lo, hi]` onto `[-1, 1]`.
fn interval_map(lo: f64, hi: f64) -> Result<BallMap> {
    let s = 2.0 / (hi - lo);
    Ok(BallMap {
        map: MapExpr::affine(vec![vec![s]], vec![-1.0 - s * lo])?,
        certificate: None,
        squeeze: None,
        attempts: vec![],
    })
}

/// `Delta_d -> B_d`: `2t - 1` for `d = 1`, otherwise the squeeze composed
/// with `Delta_d -> Delta'_d = {x_i >= -1, sum x <= sqrt d}`.
pub fn simplex_to_ball(d: usize) -> Result<BallMap> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if d == 1 {
        return interval_map(0.0, 1.0);
    }
    let df = d as f64;
    let s = df.sqrt() + df;
    let matrix = (0..d)
        .map(|i| (0..d).map(|j| if i == j { s } else { 0.0 }).collect())
        .collect();
    let affine = MapExpr::affine(matrix, vec![-1.0; d])?;
    let simplex = solid_simplex(d);
    let witnesses = simplex.vertices().to_vec();
    let r2 = 2 * (d * d) as u32;
    let cert = SandwichCertificate {
        d,
        affine,
        center: vec![1.0 / s; d],
        inradius: 1.0 / s,
        outer_r2: r2,
        witnesses,
    };
    finish(cert, r2)
}

pub fn cube_to_ball(d: usize) -> Result<BallMap> {
    if d == 1 {
        return interval_map(-1.0, 1.0);
    }
    sandwich_squeeze(&hypercube(d))
}

pub fn prism_to_ball(d: usize) -> Result<BallMap> {
    if d == 1 {
        return interval_map(-1.0, 1.0);
    }
    sandwich_squeeze(&prism(d))
}

/// The cylinder `B_{d-1} x [-1, 1]` contains `B_d` and lies in the ball of
/// radius `sqrt 2`, so the squeeze applies with `A` the identity.
pub fn cylinder_to_ball(d: usize) -> Result<BallMap> {
    if d == 1 {
        return interval_map(-1.0, 1.0);
    }
    let mut w = vec![0.0; d];
    w[0] = 1.0;
    w[d - 1] = 1.0;
    let cert = SandwichCertificate {
        d,
        affine: MapExpr::identity(d),
        center: vec![0.0; d],
        inradius: 1.0,
        outer_r2: 2,
        witnesses: vec![w],
    };
    finish(cert, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ConvexPolytope;

    #[test]
    fn cube_certificate() {
        let b = cube_to_ball(2).unwrap();
        let c = b.certificate.unwrap();
        assert!((c.inradius - 1.0).abs() < 1e-9);
        assert!(c.center.iter().all(|x| x.abs() < 1e-9));
        assert_eq!(c.outer_r2, 2);
        assert_eq!(c.witnesses.len(), 4);
    }

    #[test]
    fn modified_simplex_vertices_fit_under_2d2() {
        for d in 2..=4usize {
            let df = d as f64;
            let v2 = df * df + 2.0 * df.sqrt() * (df - 1.0);
            assert!(v2 < 2.0 * df * df);
            let b = simplex_to_ball(d).unwrap();
            let cert = b.certificate.unwrap();
            for v in &cert.witnesses {
                let y = cert.apply(v);
                assert!(norm2(&y) <= v2 + 1e-9);
            }
        }
    }

    #[test]
    fn escalation_is_recorded_then_balanced() {
        let (s, attempts) = certify_squeeze(8).unwrap();
        assert_eq!(attempts.len(), MAX_ESCALATIONS as usize + 2);
        assert!(attempts[..5].iter().all(|a| !a.accepted && a.rule == ExponentRule::Flat));
        assert_eq!(s.rule, ExponentRule::Balanced);
        assert_eq!(s.r2, 9);
    }

    #[test]
    fn one_dimensional_maps_are_affine() {
        let b = simplex_to_ball(1).unwrap();
        assert_eq!(b.map.eval(&[0.0]).unwrap(), vec![-1.0]);
        assert_eq!(b.map.eval(&[1.0]).unwrap(), vec![1.0]);
        for m in [cube_to_ball(1), prism_to_ball(1), cylinder_to_ball(1)] {
            let m = m.unwrap().map;
            assert_eq!(m.eval(&[-1.0]).unwrap(), vec![-1.0]);
            assert_eq!(m.eval(&[1.0]).unwrap(), vec![1.0]);
        }
    }

    #[test]
    fn thin_polytope_is_degenerate() {
        let thin = ConvexPolytope::from_vertices(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1e-12],
            vec![1.0, 1e-12],
        ]);
        // either the hull or the squeeze must refuse it
        if let Ok(p) = thin {
            assert!(sandwich_squeeze(&p).is_err());
        }
    }
}
