//! A polytope, a base simplex on its boundary, and an interior apex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, sub};
use crate::models::{ConvexPolytope, CornerComplex, LinearForm};

/// Tolerance for the incidence invariants of an instance.
pub const INSTANCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApexInstance {
    pub n: usize,
    pub polytope: ConvexPolytope,
    /// Base simplex vertices `v_1..v_n`.
    pub sigma: Vec<Vec<f64>>,
    pub apex: Vec<f64>,
    /// `h_i` vanishes on `p` and every `v_j`, `j != i`, and is positive at `v_i`.
    pub h: Vec<LinearForm>,
    /// Vanishes on `sigma`, positive at the apex.
    pub h0: LinearForm,
}

impl ApexInstance {
    /// Derives the facet forms of `conv(sigma, apex)` and validates.
    pub fn new(polytope: ConvexPolytope, sigma: Vec<Vec<f64>>, apex: Vec<f64>, h0: Option<LinearForm>) -> Result<Self> {
        let n = polytope.dim();
        if sigma.len() != n {
            return Err(Error::dim("base simplex vertices", n, sigma.len()));
        }
        if let Some(v) = sigma.iter().find(|v| v.len() != n) {
            return Err(Error::dim("base vertex", n, v.len()));
        }
        if apex.len() != n {
            return Err(Error::dim("apex", n, apex.len()));
        }
        let h = (0..n)
            .map(|i| {
                let mut pts = vec![apex.clone()];
                pts.extend(sigma.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()));
                LinearForm::through(&pts, &sigma[i])
            })
            .collect::<Result<Vec<_>>>()?;
        let h0 = match h0 {
            Some(f) => f,
            None => LinearForm::through(&sigma, &apex)?,
        };
        let inst = ApexInstance { n, polytope, sigma, apex, h, h0 };
        inst.validate()?;
        Ok(inst)
    }

    /// `K = [0,3]^2`, `sigma = [(1,0), (2,0)]`, `p = (1.5, 1)`, `h_0 = y`.
    pub fn unit_triangle() -> Self {
        let k = ConvexPolytope::from_vertices(vec![
            vec![0.0, 0.0],
            vec![3.0, 0.0],
            vec![3.0, 3.0],
            vec![0.0, 3.0],
        ])
        .expect("square");
        ApexInstance::new(
            k,
            vec![vec![1.0, 0.0], vec![2.0, 0.0]],
            vec![1.5, 1.0],
            Some(LinearForm::new(vec![0.0, 1.0], 0.0)),
        )
        .expect("unit triangle instance")
    }

    /// The cell `index` of a corner complex, with `K` its polyhedron.
    pub fn from_corner_cell(complex: &CornerComplex, index: usize) -> Result<Self> {
        let cell = complex
            .cells
            .get(index)
            .ok_or_else(|| Error::InvalidInput(format!("no cell {index}")))?;
        let mut base = cell.base.clone();
        // orient (v_1, .., v_n, p) positively so planar loops run counter-clockwise
        if orientation(&base, &complex.apex) < 0.0 {
            base.swap(0, 1);
        }
        ApexInstance::new(complex.polyhedron.clone(), base, complex.apex.clone(), None)
    }

    pub fn g(&self) -> &[LinearForm] {
        self.polytope.facets()
    }

    /// All facet forms of `conv(sigma, apex)`: `h_0, h_1, .., h_n`.
    pub fn hat_forms(&self) -> Vec<LinearForm> {
        let mut f = vec![self.h0.clone()];
        f.extend(self.h.iter().cloned());
        f
    }

    /// `conv(sigma, apex)`.
    pub fn hat_simplex(&self) -> Result<ConvexPolytope> {
        let mut v = self.sigma.clone();
        v.push(self.apex.clone());
        ConvexPolytope::simplex(v)
    }

    /// Minimum of the forms of `conv(sigma, apex)` at `x`: positive inside.
    pub fn hat_margin(&self, x: &[f64]) -> f64 {
        self.hat_forms().iter().map(|f| f.eval(x)).fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::Precondition(what));
        let scale = 1.0 + self.sigma.iter().chain([&self.apex]).map(|v| crate::linalg::max_abs(v)).fold(0.0, f64::max);
        let tol = INSTANCE_TOL * scale;
        for (i, hi) in self.h.iter().enumerate() {
            if hi.eval(&self.apex).abs() > tol {
                return bad(format!("h_{} does not vanish at the apex", i + 1));
            }
            for (j, v) in self.sigma.iter().enumerate() {
                let val = hi.eval(v);
                if j != i && val.abs() > tol {
                    return bad(format!("h_{} does not vanish at v_{}", i + 1, j + 1));
                }
                if j == i && !(val > tol) {
                    return bad(format!("h_{} is not positive at v_{}", i + 1, i + 1));
                }
            }
        }
        for (j, v) in self.sigma.iter().enumerate() {
            if self.h0.eval(v).abs() > tol {
                return bad(format!("h_0 does not vanish at v_{}", j + 1));
            }
        }
        if !(self.h0.eval(&self.apex) > tol) {
            return bad("h_0 is not positive at the apex".into());
        }
        for (k, g) in self.g().iter().enumerate() {
            if !(g.eval(&self.apex) > tol) {
                return bad(format!("apex is not interior (g_{} = {})", k + 1, g.eval(&self.apex)));
            }
            if let Some(v) = self.sigma.iter().find(|v| g.eval(v) < -tol) {
                return bad(format!("vertex {v:?} violates g_{}", k + 1));
            }
        }
        Ok(())
    }

    /// `u_i = p - v_i`.
    pub fn u(&self) -> Vec<Vec<f64>> {
        self.sigma.iter().map(|v| sub(&self.apex, v)).collect()
    }
}

/// Sign of `det(v_2 - v_1, .., v_n - v_1, p - v_1)`.
pub fn orientation(sigma: &[Vec<f64>], apex: &[f64]) -> f64 {
    let n = apex.len();
    let mut rows: Vec<Vec<f64>> = sigma[1..].iter().map(|v| sub(v, &sigma[0])).collect();
    rows.push(sub(apex, &sigma[0]));
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    m.determinant()
}

/// `vec h (x) = h(x) - h(0)`.
pub fn linear_part(f: &LinearForm, x: &[f64]) -> f64 {
    dot(&f.coeffs, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_triangle_forms() {
        let inst = ApexInstance::unit_triangle();
        assert_eq!(inst.u()[0], vec![0.5, 1.0]);
        assert!(orientation(&inst.sigma, &inst.apex) > 0.0);
        assert!(inst.hat_margin(&[1.5, 0.5]) > 0.0);
        assert!(inst.hat_margin(&[1.5, 1.5]) < 0.0);
    }

    #[test]
    fn corner_cells_are_instances() {
        for k in 0..=2 {
            let c = crate::models::corner_complex(2, k).unwrap();
            for i in 0..c.cells.len() {
                let inst = ApexInstance::from_corner_cell(&c, i).unwrap();
                assert!(orientation(&inst.sigma, &inst.apex) > 0.0);
            }
        }
    }

    #[test]
    fn exterior_apex_is_rejected() {
        let inst = ApexInstance::unit_triangle();
        assert!(ApexInstance::new(inst.polytope.clone(), inst.sigma.clone(), vec![1.5, 4.0], None).is_err());
    }
}
