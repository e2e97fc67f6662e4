//! Replacing each piecewise apex path by one polynomial with the same
//! order-3 jets at both anchors.

use serde::{Deserialize, Serialize};

use super::instance::ApexInstance;
use super::map::{CoverMap, SweepOptions};
use super::paths::{check_conditions, SIGN_SAMPLES};
use crate::error::{Error, Result};
use crate::pathfit::{approx_fit, FitOptions, FitResult, JetSpec};
use crate::verify::{CoverageOptions, VerificationReport};

/// Jet order kept at `t = 0` and `t = 1`.
pub const SMOOTH_ORDER: usize = 3;
/// Tolerance used when the fit cannot get within the robustness radius.
pub const FALLBACK_EPS: f64 = 1e-2;
/// Tolerance halvings tried when the sign conditions fail after a fit.
pub const SMOOTH_RETRIES: usize = 4;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Smoothed {
    pub cover: CoverMap,
    pub fits: Vec<FitResult>,
    /// Tolerance that finally succeeded.
    pub eps: f64,
    pub conditions: VerificationReport,
}

/// Where path `i` may run: the open apex simplex or the open region of `K`
/// on the negative side of every `h_j`, `j != i`.
pub fn path_margin(inst: &ApexInstance, i: usize, x: &[f64]) -> f64 {
    let mut side = inst.polytope.min_facet_value(x);
    for (j, h) in inst.h.iter().enumerate() {
        if j != i {
            side = side.min(-h.eval(x));
        }
    }
    inst.hat_margin(x).max(side)
}

/// Fit every path of `cover` within `eps`, halving the tolerance while the
/// sign conditions of the fitted paths fail.
pub fn smooth_paths(cover: &CoverMap, eps: f64, opts: &FitOptions) -> Result<Smoothed> {
    let inst = &cover.instance;
    let delta = cover.paths.delta;
    let opts = FitOptions { domain: cover.paths.domain(), ..opts.clone() };
    let mut eps = eps;
    let mut last = None;
    for _ in 0..=SMOOTH_RETRIES {
        let fits = cover
            .paths
            .paths
            .iter()
            .enumerate()
            .map(|(i, path)| {
                let spec = JetSpec::from_curve(path, &[0.0, 1.0], SMOOTH_ORDER)?;
                let set = |x: &[f64]| path_margin(inst, i, x);
                approx_fit(path, &spec, eps, Some(&set), &opts)
            })
            .collect::<Result<Vec<_>>>()?;
        let curves: Vec<_> = fits.iter().map(|f| f.path.clone()).collect();
        let conditions = check_conditions(inst, &curves, delta, SIGN_SAMPLES)?;
        if conditions.passed {
            let smoothed = CoverMap::new(inst.clone(), cover.paths.with_paths(curves))?;
            return Ok(Smoothed { cover: smoothed, fits, eps, conditions });
        }
        last = Some(conditions.summary());
        eps *= 0.5;
    }
    Err(Error::Precondition(format!(
        "smoothed paths keep failing the sign conditions: {}",
        last.unwrap_or_default()
    )))
}

/// Smoothing aimed at the robustness radius, with its own verification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusSmoothing {
    pub smoothed: Smoothed,
    pub radius: f64,
    /// Whether the fitted paths lie within `radius` of the originals.
    pub within_radius: bool,
    /// Why the attempt at `radius` failed, when it did.
    pub first_attempt: Option<String>,
    /// The covering conclusions checked directly on the smoothed map.
    pub verification: VerificationReport,
}

/// Smooth within `radius`, where the perturbation argument applies as is.
/// When the fit hits its degree cap there, smooth within `fallback`
/// instead and rely on the direct verification of the result.
pub fn smooth_within_radius(
    cover: &CoverMap,
    radius: f64,
    fallback: f64,
    opts: &FitOptions,
    sweep: &SweepOptions,
    n_targets: usize,
    cov: &CoverageOptions,
) -> Result<RadiusSmoothing> {
    let (smoothed, first_attempt) = match smooth_paths(cover, radius, opts) {
        Ok(s) => (s, None),
        Err(e @ (Error::DegreeCap { .. } | Error::Precondition(_))) if fallback > radius => {
            (smooth_paths(cover, fallback, opts)?, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    let mut verification = smoothed.cover.verify(sweep, n_targets, cov)?;
    verification.detail("radius", radius);
    verification.detail("eps", smoothed.eps);
    if let Some(reason) = &first_attempt {
        verification.note(format!("fit within the radius failed: {reason}"));
    }
    Ok(RadiusSmoothing {
        within_radius: smoothed.eps <= radius,
        smoothed,
        radius,
        first_attempt,
        verification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::build_apex_paths;

    #[test]
    fn unit_triangle_smooths_with_jets_kept() {
        let inst = ApexInstance::unit_triangle();
        let paths = build_apex_paths(&inst).unwrap();
        let cover = CoverMap::new(inst, paths).unwrap();
        let s = smooth_paths(&cover, 1e-2, &FitOptions::default()).unwrap();
        assert!(s.conditions.passed);
        for (f, p) in s.fits.iter().zip(&cover.paths.paths) {
            assert!(f.path.is_single_polynomial());
            assert!(f.jet_residual < 1e-8);
            // independent dense comparison
            let worst = (0..=10_000)
                .map(|k| {
                    let t = -cover.paths.delta + (1.0 + 2.0 * cover.paths.delta) * k as f64 / 10_000.0;
                    crate::linalg::dist(&f.path.eval(t), &p.eval(t))
                })
                .fold(0.0, f64::max);
            assert!(worst < s.eps, "{worst}");
        }
    }
}
