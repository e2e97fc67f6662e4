//! A polynomial negative on a compact sample set and positive on a closed
//! one: a least-squares polynomial close to a signed-distance surrogate on
//! the unit ball, plus a large even power of the norm that dominates it
//! outside.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dist, lstsq, norm, sub};
use crate::models::{Region, SampleMode, SemialgebraicSet};
use crate::polycore::{compose, MapExpr, Polynomial};

/// Radius the compact set is scaled into (strictly inside `1/2`).
pub const INNER_RADIUS: f64 = 0.45;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationOptions {
    /// Degree cap of the fitted part; tried in steps of 2 from 2.
    pub max_degree: u32,
    /// Uniform points of the unit ball used in the fit.
    pub fit_points: usize,
    /// Samples of each set added to the fit, at most.
    pub fit_set_points: usize,
    pub seed: u64,
    pub max_k: u32,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        SeparationOptions { max_degree: 16, fit_points: 3000, fit_set_points: 500, seed: 11, max_k: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    /// `f`, in the original coordinates.
    pub poly: Polynomial,
    /// The normalization `x -> scale (x - center)`.
    pub center: Vec<f64>,
    pub scale: f64,
    pub fit_degree: u32,
    /// Sampled distance between the sets after normalization.
    pub eps: f64,
    /// Largest `|f_0 - g|` over the fit and sample points of the unit ball.
    pub fit_error: f64,
    /// `|f_0| < c' |x|^(2m)` outside the unit ball.
    pub c_prime: f64,
    pub m: u32,
    pub k: u32,
    /// `min -f` over the first samples.
    pub inner_margin: f64,
    /// `min f` over the second samples.
    pub outer_margin: f64,
}

fn exponents(n: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; n]];
    for total in 1..=max_total {
        let mut level = Vec::new();
        fill(n, total, &mut vec![0; n], 0, &mut level);
        out.extend(level);
    }
    out
}

fn fill(n: usize, left: u32, cur: &mut Vec<u32>, i: usize, out: &mut Vec<Vec<u32>>) {
    if i == n - 1 {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        fill(n, left - e, cur, i + 1, out);
    }
    cur[i] = 0;
}

fn monomial(x: &[f64], e: &[u32]) -> f64 {
    x.iter().zip(e).map(|(v, &p)| v.powi(p as i32)).product()
}

/// `(sum x_i^2)^k`.
fn norm_power(n: usize, k: u32) -> Polynomial {
    let square = (0..n).fold(Polynomial::zero(n), |acc, i| {
        let x = Polynomial::variable(n, i);
        acc.add_poly(&x.mul_poly(&x))
    });
    let mut out = Polynomial::constant(n, 1.0);
    for _ in 0..k {
        out = out.mul_poly(&square);
    }
    out
}

fn stride_pick(points: &[Vec<f64>], max: usize) -> Vec<Vec<f64>> {
    let step = points.len().div_ceil(max.max(1)).max(1);
    points.iter().step_by(step).cloned().collect()
}

/// Distance from `x` to the nearest of `points`.
fn nearest(points: &[Vec<f64>], x: &[f64]) -> f64 {
    points.iter().map(|p| dist(p, x)).fold(f64::INFINITY, f64::min)
}

/// Separating polynomial for two finite samples: `f < 0` on every point of
/// `inner` and `f > 0` on every point of `outer`.
pub fn separation_poly(inner: &[Vec<f64>], outer: &[Vec<f64>], opts: &SeparationOptions) -> Result<Separation> {
    if inner.is_empty() || outer.is_empty() {
        return Err(Error::InvalidInput("both sample sets must be non-empty".into()));
    }
    let n = inner[0].len();
    if let Some(p) = inner.iter().chain(outer).find(|p| p.len() != n) {
        return Err(Error::dim("separation sample", n, p.len()));
    }
    // scale the compact set into B(0, 1/2)
    let center = crate::linalg::centroid(inner);
    let radius = inner.iter().map(|p| dist(p, &center)).fold(0.0, f64::max);
    let scale = if radius > INNER_RADIUS { INNER_RADIUS / radius } else { 1.0 };
    let normal = |p: &Vec<f64>| -> Vec<f64> { sub(p, &center).iter().map(|v| scale * v).collect() };
    let a: Vec<Vec<f64>> = inner.iter().map(normal).collect();
    let b: Vec<Vec<f64>> = outer.iter().map(normal).collect();
    let eps = b.par_iter().map(|y| nearest(&a, y)).reduce(|| f64::INFINITY, f64::min);
    if !(eps > 0.0) {
        return Err(Error::Separation("the sample sets meet".into()));
    }
    // continuous, -1 on the inner samples and +1 on the outer ones
    let surrogate = |x: &[f64]| 2.0 * nearest(&a, x).min(eps) / eps - 1.0;

    let ball = SemialgebraicSet::ball(&vec![0.0; n], 1.0);
    let mut fit: Vec<Vec<f64>> = ball.sample(opts.fit_points, opts.seed, SampleMode::Interior)?;
    fit.extend(stride_pick(&a, opts.fit_set_points));
    let near: Vec<Vec<f64>> = b.iter().filter(|y| norm(y) <= 1.0).cloned().collect();
    fit.extend(stride_pick(&near, opts.fit_set_points));
    let g: Vec<f64> = fit.par_iter().map(|x| surrogate(x)).collect();

    let mut last = String::new();
    for degree in (2..=opts.max_degree.max(2)).step_by(2) {
        let exps = exponents(n, degree);
        let design = DMatrix::from_fn(fit.len(), exps.len(), |i, j| monomial(&fit[i], &exps[j]));
        let rhs = DMatrix::from_column_slice(g.len(), 1, &g);
        let Some(coef) = lstsq(&design, &rhs) else {
            last = format!("least squares failed at degree {degree}");
            continue;
        };
        let f0 = Polynomial::new(n, exps.iter().cloned().zip(coef.iter().copied()))?;
        let fit_error = fit
            .iter()
            .zip(&g)
            .chain(a.iter().map(|x| (x, &-1.0)))
            .chain(near.iter().map(|x| (x, &1.0)))
            .map(|(x, gx)| (f0.eval(x) - gx).abs())
            .fold(0.0, f64::max);
        // |x^e| <= (1 + |x|^2)^m for |e| <= 2m, and 1 + |x|^2 < 2|x|^2 off the ball
        let m = degree.div_ceil(2).max(1);
        let c = f0.l1_norm() * (1.0 + 1e-9) + f64::MIN_POSITIVE;
        let c_prime = 2f64.powi(m as i32) * c;
        let mut k = m;
        while c_prime / 4f64.powi(k as i32) >= 1.0 / 3.0 && k < opts.max_k {
            k += 1;
        }
        let normalized = f0.add_poly(&norm_power(n, k).scale_poly(c_prime));
        let chart = MapExpr::affine(
            (0..n).map(|i| (0..n).map(|j| if i == j { scale } else { 0.0 }).collect()).collect(),
            center.iter().map(|c| -scale * c).collect(),
        )?;
        let poly = compose(&MapExpr::polynomial(vec![normalized])?, &chart)?
            .expand()?
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidMap("empty expansion".into()))?;
        let inner_margin = inner.par_iter().map(|x| -poly.eval(x)).reduce(|| f64::INFINITY, f64::min);
        let outer_margin = outer.par_iter().map(|x| poly.eval(x)).reduce(|| f64::INFINITY, f64::min);
        if inner_margin > 0.0 && outer_margin > 0.0 {
            return Ok(Separation {
                poly,
                center,
                scale,
                fit_degree: degree,
                eps,
                fit_error,
                c_prime,
                m,
                k,
                inner_margin,
                outer_margin,
            });
        }
        last = format!(
            "degree {degree}: fit error {fit_error:.3e}, margins {inner_margin:.3e} / {outer_margin:.3e}"
        );
    }
    Err(Error::Separation(last))
}

/// Samples `n` points of each set (the second may be clipped to its
/// bounding box) and separates them.
pub fn separate_sets(
    inner: &dyn Region,
    outer: &dyn Region,
    n: usize,
    seed: u64,
    opts: &SeparationOptions,
) -> Result<Separation> {
    let a = inner.sample(n, seed, SampleMode::Interior)?;
    let b = outer.sample(n, seed.wrapping_add(1), SampleMode::Interior)?;
    separation_poly(&a, &b, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_count_is_binomial() {
        assert_eq!(exponents(2, 4).len(), 15);
        assert_eq!(exponents(3, 2).len(), 10);
    }

    #[test]
    fn norm_power_matches_direct_evaluation() {
        let p = norm_power(3, 4);
        let x = [0.3, -0.5, 1.1];
        let r2: f64 = x.iter().map(|v| v * v).sum();
        assert!((p.eval(&x) - r2.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn point_against_shell() {
        let shell: Vec<Vec<f64>> = (0..2000)
            .map(|i| {
                let a = i as f64 * 0.7;
                let r = 1.0 + (i % 37) as f64 / 10.0;
                vec![r * a.cos(), r * a.sin()]
            })
            .collect();
        let s = separation_poly(&[vec![0.0, 0.0]], &shell, &SeparationOptions::default()).unwrap();
        assert!(s.poly.eval(&[0.0, 0.0]) < 0.0);
        assert!(shell.iter().all(|x| s.poly.eval(x) > 0.0));
    }
}
