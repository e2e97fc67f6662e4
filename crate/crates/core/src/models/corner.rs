//! Corner polyhedra `K_k = conv(0, e_1..e_k, +-e_{k+1}..+-e_d)` and their
//! cone triangulations from the apex `p_k`.

use serde::{Deserialize, Serialize};

use super::polytope::ConvexPolytope;
use super::region::{Region, SampleMode};
use crate::error::{Error, Result};

/// A top simplex of the fan: the cone from the apex over a boundary face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerCell {
    /// Vertices of the base face on the boundary of `K_k`.
    pub base: Vec<Vec<f64>>,
    /// `conv(base, apex)`, with the apex as last vertex.
    pub simplex: ConvexPolytope,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerComplex {
    pub d: usize,
    pub k: usize,
    pub polyhedron: ConvexPolytope,
    pub apex: Vec<f64>,
    pub cells: Vec<CornerCell>,
}

fn unit(d: usize, i: usize, s: f64) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = s;
    e
}

impl CornerComplex {
    pub fn top_simplices(&self) -> Vec<&ConvexPolytope> {
        self.cells.iter().map(|c| &c.simplex).collect()
    }

    /// Whether `x` lies on `d Lambda_k = {x_j = 0 for some j <= k}`
    /// (within `tol`), restricted to the non-negative orthant part.
    pub fn on_lambda_boundary(&self, x: &[f64], tol: f64) -> bool {
        (0..self.k).any(|j| x[j].abs() <= tol)
    }

    /// Largest sampled distance between a point of `cell ∩ dLambda_k` and
    /// the base face; zero when the face condition holds.
    pub fn face_condition_gap(&self, cell: &CornerCell, n: usize, seed: u64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for j in 0..self.k {
            let on: Vec<Vec<f64>> = cell
                .simplex
                .vertices()
                .iter()
                .filter(|v| v[j].abs() <= 1e-12)
                .cloned()
                .collect();
            if on.is_empty() {
                continue;
            }
            // every vertex of the cell has x_j >= 0, so the slice x_j = 0 is
            // the face spanned by the vertices with x_j = 0
            let face = super::set::SemialgebraicSet::new(self.d, vec![], None)?
                .with_sampler(super::set::ShapeHint::Hull { vertices: on });
            for p in face.sample(n, seed.wrapping_add(j as u64), SampleMode::Barycentric)? {
                worst = worst.max(distance_to_hull(&p, &cell.base));
            }
        }
        Ok(worst)
    }
}

/// Distance from `x` to `conv(points)` when `x` lies in their affine span
/// (barycentric least squares, then clamped weights).
fn distance_to_hull(x: &[f64], points: &[Vec<f64>]) -> f64 {
    use nalgebra::{DMatrix, DVector};
    let d = x.len();
    let k = points.len();
    let a = DMatrix::from_fn(d + 1, k, |i, j| if i < d { points[j][i] } else { 1.0 });
    let mut b = DVector::from_column_slice(x);
    b = b.push(1.0);
    let Some(w) = crate::linalg::lstsq(&a, &DMatrix::from_column_slice(d + 1, 1, b.as_slice()))
    else {
        return f64::INFINITY;
    };
    let neg: f64 = w.iter().filter(|v| **v < 0.0).map(|v| -v).sum();
    let fit = crate::linalg::combine(w.as_slice(), points);
    crate::linalg::dist(&fit, x) + neg
}

/// The corner complex of dimension `d` and corner index `k`.
pub fn corner_complex(d: usize, k: usize) -> Result<CornerComplex> {
    if d == 0 || k > d {
        return Err(Error::InvalidInput(format!("need 0 <= k <= d, d >= 1 (d={d}, k={k})")));
    }
    let apex: Vec<f64> = (0..d)
        .map(|j| if j < k { 1.0 / (2 * d - k + 1) as f64 } else { 0.0 })
        .collect();
    let mut points = vec![vec![0.0; d]];
    points.extend((0..k).map(|j| unit(d, j, 1.0)));
    for j in k..d {
        points.push(unit(d, j, 1.0));
        points.push(unit(d, j, -1.0));
    }
    let polyhedron = ConvexPolytope::from_vertices(points)?;
    let mut cells = Vec::new();
    for mask in 0..1usize << (d - k) {
        // Delta(eps) = conv(0, e_1..e_k, eps_j e_j for j > k)
        let mut delta = vec![vec![0.0; d]];
        delta.extend((0..k).map(|j| unit(d, j, 1.0)));
        for (bit, j) in (k..d).enumerate() {
            let s = if mask >> bit & 1 == 1 { -1.0 } else { 1.0 };
            delta.push(unit(d, j, s));
        }
        // boundary faces: drop the origin, or drop e_j with j <= k
        for drop in 0..=k {
            let base: Vec<Vec<f64>> = delta
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, v)| v.clone())
                .collect();
            let mut verts = base.clone();
            verts.push(apex.clone());
            let simplex = ConvexPolytope::simplex(verts)?;
            cells.push(CornerCell { base, simplex });
        }
    }
    Ok(CornerComplex {
        d,
        k,
        polyhedron,
        apex,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apex_and_cell_counts_in_the_plane() {
        let c0 = corner_complex(2, 0).unwrap();
        assert_eq!(c0.cells.len(), 4);
        assert_eq!(c0.apex, vec![0.0, 0.0]);
        let c1 = corner_complex(2, 1).unwrap();
        assert_eq!(c1.apex, vec![0.25, 0.0]);
        assert_eq!(c1.cells.len(), 4);
        let c2 = corner_complex(2, 2).unwrap();
        assert!((c2.apex[0] - 1.0 / 3.0).abs() < 1e-15 && (c2.apex[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c2.cells.len(), 3);
        assert!(corner_complex(2, 3).is_err());
    }

    #[test]
    fn apex_is_interior_and_a_vertex_of_each_cell() {
        for d in 1..=3 {
            for k in 0..=d {
                let c = corner_complex(d, k).unwrap();
                assert!(c.polyhedron.min_facet_value(&c.apex) > 1e-9, "d={d} k={k}");
                for cell in &c.cells {
                    assert!(cell.simplex.vertices().iter().any(|v| v == &c.apex));
                }
            }
        }
    }
}
