//! Inverse stereographic projection and the covers built from it.

use crate::error::Result;
use crate::polycore::{compose, MapExpr, Polynomial};

/// `1 / (1 + |x|^2)` on `R^d`.
fn conformal_factor(d: usize) -> Result<MapExpr> {
    let n2 = MapExpr::norm_square(MapExpr::identity(d));
    let shifted = compose(&MapExpr::affine(vec![vec![1.0]], vec![1.0])?, &n2)?;
    Ok(MapExpr::reciprocal(shifted))
}

/// `phi(x) = (2x, |x|^2 - 1) / (1 + |x|^2)`, `R^d -> S^d`, `phi(0)` the
/// south pole.
pub fn stereographic_inverse(d: usize) -> Result<MapExpr> {
    let mut matrix: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 2.0 } else { 0.0 }).collect())
        .collect();
    matrix.push(vec![0.0; d]);
    let mut offset = vec![0.0; d];
    offset.push(-1.0);
    let mut last = vec![0.0; d + 1];
    last[d] = 1.0;
    let numerator = MapExpr::sum(vec![
        MapExpr::affine(matrix, offset)?,
        MapExpr::product(vec![
            MapExpr::norm_square(MapExpr::identity(d)),
            MapExpr::constant(d, last)?,
        ])?,
    ])?;
    MapExpr::product(vec![numerator, conformal_factor(d)?])
}

/// First `d` coordinates of `phi`: `x -> 2x / (1 + |x|^2)`, onto `B_d`.
pub fn ball_double_cover(d: usize) -> Result<MapExpr> {
    let proj = (0..d)
        .map(|i| (0..=d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    compose(&MapExpr::affine(proj, vec![0.0; d])?, &stereographic_inverse(d)?)
}

/// Complex squaring `(x, y) -> (x^2 - y^2, 2xy)`.
pub fn complex_square() -> Result<MapExpr> {
    MapExpr::polynomial(vec![
        Polynomial::new(2, [(vec![2, 0], 1.0), (vec![0, 2], -1.0)])?,
        Polynomial::new(2, [(vec![1, 1], 2.0)])?,
    ])
}

/// `c(t) = g(f(t))` with `f(t) = (2t, 1 - t^2) / (1 + t^2)` and `g` complex
/// squaring; maps `[-1, 1]` onto `S^1`.
pub fn circle_cover() -> Result<MapExpr> {
    let numerator = MapExpr::polynomial(vec![
        Polynomial::univariate(&[0.0, 2.0]),
        Polynomial::univariate(&[1.0, 0.0, -1.0]),
    ])?;
    let f = MapExpr::product(vec![numerator, conformal_factor(1)?])?;
    compose(&complex_square()?, &f)
}
