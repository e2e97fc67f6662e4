//! Convex polytopes carrying matching vertex and facet descriptions.

use serde::{Deserialize, Serialize};

use super::linear_form::LinearForm;
use super::region::{chunked, dirichlet, rejection, Region, SampleMode};
use super::set::{BasicClosedSet, Constraint, Relation, SemialgebraicSet};
use crate::error::{Error, Result};
use crate::linalg::{combinations, combine, rank, solve, sub};

/// Tolerance for vertex/facet incidence.
pub const INCIDENCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<LinearForm>,
}

fn dedupe_points(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !out
            .iter()
            .any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).abs() <= INCIDENCE_TOL))
        {
            out.push(p);
        }
    }
    out
}

fn same_form(a: &LinearForm, b: &LinearForm) -> bool {
    (a.constant - b.constant).abs() <= INCIDENCE_TOL
        && a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .all(|(x, y)| (x - y).abs() <= INCIDENCE_TOL)
}

impl ConvexPolytope {
    /// Convex hull of `points` (small dimension; facets by brute force over
    /// `d`-subsets). Non-extreme input points are dropped.
    pub fn from_vertices(points: Vec<Vec<f64>>) -> Result<Self> {
        let d = points
            .first()
            .ok_or_else(|| Error::Degenerate("empty vertex list".into()))?
            .len();
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidInput("inconsistent vertex dimensions".into()));
        }
        let points = dedupe_points(points);
        if points.len() < d + 1 {
            return Err(Error::Degenerate("fewer than d+1 distinct points".into()));
        }
        let mut facets: Vec<LinearForm> = Vec::new();
        for idx in combinations(points.len(), d) {
            let subset: Vec<Vec<f64>> = idx.iter().map(|&i| points[i].clone()).collect();
            let Some(normal) = crate::linalg::hyperplane_normal(&subset) else {
                continue;
            };
            let form = LinearForm::new(normal.clone(), -crate::linalg::dot(&normal, &subset[0]));
            let values: Vec<f64> = points.iter().map(|p| form.eval(p)).collect();
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let oriented = if lo >= -INCIDENCE_TOL && hi > INCIDENCE_TOL {
                form
            } else if hi <= INCIDENCE_TOL && lo < -INCIDENCE_TOL {
                form.negated()
            } else {
                continue;
            };
            if !facets.iter().any(|f| same_form(f, &oriented)) {
                facets.push(oriented);
            }
        }
        if facets.len() < d + 1 {
            return Err(Error::Degenerate("polytope is not full-dimensional".into()));
        }
        let vertices = extreme_points(&points, &facets, d);
        Self::new(vertices, facets)
    }

    /// Polytope `{h >= 0 for all h}`; must be bounded and full-dimensional.
    pub fn from_facets(forms: Vec<LinearForm>) -> Result<Self> {
        let d = forms
            .first()
            .ok_or_else(|| Error::Degenerate("no facets".into()))?
            .dim();
        let forms: Vec<LinearForm> = forms
            .iter()
            .map(LinearForm::normalized)
            .collect::<Result<_>>()?;
        let mut candidates = Vec::new();
        for idx in combinations(forms.len(), d) {
            let a: Vec<Vec<f64>> = idx.iter().map(|&i| forms[i].coeffs.clone()).collect();
            let b: Vec<f64> = idx.iter().map(|&i| -forms[i].constant).collect();
            if let Some(x) = solve(&a, &b) {
                if forms.iter().all(|f| f.eval(&x) >= -INCIDENCE_TOL) {
                    candidates.push(x);
                }
            }
        }
        let vertices = dedupe_points(candidates);
        if vertices.len() < d + 1 {
            return Err(Error::Degenerate("facets do not bound a full-dimensional polytope".into()));
        }
        // keep only forms supported by d affinely independent vertices
        let mut facets: Vec<LinearForm> = Vec::new();
        for f in forms {
            let on: Vec<Vec<f64>> = vertices
                .iter()
                .filter(|v| f.eval(v).abs() <= INCIDENCE_TOL)
                .cloned()
                .collect();
            if affine_rank(&on) + 1 >= d && on.len() >= d && !facets.iter().any(|g| same_form(g, &f)) {
                facets.push(f);
            }
        }
        Self::new(vertices, facets)
    }

    /// Validating constructor from both descriptions.
    pub fn new(vertices: Vec<Vec<f64>>, facets: Vec<LinearForm>) -> Result<Self> {
        let d = vertices
            .first()
            .ok_or_else(|| Error::Degenerate("empty vertex list".into()))?
            .len();
        let facets = facets
            .iter()
            .map(LinearForm::normalized)
            .collect::<Result<Vec<_>>>()?;
        let p = ConvexPolytope {
            dim: d,
            vertices,
            facets,
        };
        p.validate()?;
        Ok(p)
    }

    /// The simplex spanned by `d + 1` affinely independent points.
    pub fn simplex(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let d = vertices[0].len();
        if vertices.len() != d + 1 {
            return Err(Error::InvalidInput(format!(
                "a {d}-simplex needs {} vertices",
                d + 1
            )));
        }
        let mut facets = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let others: Vec<Vec<f64>> = vertices
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.clone())
                .collect();
            facets.push(LinearForm::through(&others, &vertices[i])?);
        }
        Self::new(vertices, facets)
    }

    /// Checks the incidence invariants of both descriptions.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if self.vertices.iter().any(|v| v.len() != d) || self.facets.iter().any(|f| f.dim() != d) {
            return Err(Error::InvalidInput("inconsistent polytope dimensions".into()));
        }
        for f in &self.facets {
            if let Some(v) = self.vertices.iter().find(|v| f.eval(v) < -INCIDENCE_TOL) {
                return Err(Error::InvalidInput(format!(
                    "vertex {v:?} violates a facet by {:e}",
                    -f.eval(v)
                )));
            }
            let on: Vec<Vec<f64>> = self
                .vertices
                .iter()
                .filter(|v| f.eval(v).abs() <= INCIDENCE_TOL)
                .cloned()
                .collect();
            if on.len() < d || affine_rank(&on) + 1 < d {
                return Err(Error::InvalidInput(
                    "facet not supported by d affinely independent vertices".into(),
                ));
            }
        }
        if affine_rank(&self.vertices) < d {
            return Err(Error::Degenerate("polytope is not full-dimensional".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[LinearForm] {
        &self.facets
    }

    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == self.dim + 1
    }

    pub fn centroid(&self) -> Vec<f64> {
        crate::linalg::centroid(&self.vertices)
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim;
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for v in &self.vertices {
            for j in 0..d {
                lo[j] = lo[j].min(v[j]);
                hi[j] = hi[j].max(v[j]);
            }
        }
        (lo, hi)
    }

    /// Smallest facet value; non-negative exactly on the polytope.
    pub fn min_facet_value(&self, x: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|f| f.eval(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest inscribed ball (center, radius) by linear programming.
    pub fn chebyshev_center(&self) -> Result<(Vec<f64>, f64)> {
        chebyshev_center(&self.facets, self.dim)
    }

    /// Vertices lying on facet `i`.
    pub fn facet_vertices(&self, i: usize) -> Vec<Vec<f64>> {
        let f = &self.facets[i];
        self.vertices
            .iter()
            .filter(|v| f.eval(v).abs() <= INCIDENCE_TOL)
            .cloned()
            .collect()
    }

    /// Barycentric coordinates of `x` (simplices only).
    pub fn barycentric(&self, x: &[f64]) -> Result<Vec<f64>> {
        if !self.is_simplex() {
            return Err(Error::Unsupported("barycentric coordinates need a simplex".into()));
        }
        let d = self.dim;
        let mut a = vec![vec![0.0; d + 1]; d + 1];
        for (j, v) in self.vertices.iter().enumerate() {
            for i in 0..d {
                a[i][j] = v[i];
            }
            a[d][j] = 1.0;
        }
        let mut b = x.to_vec();
        b.push(1.0);
        solve(&a, &b).ok_or_else(|| Error::Degenerate("singular simplex".into()))
    }

    pub fn to_set(&self) -> SemialgebraicSet {
        let constraints = self
            .facets
            .iter()
            .map(|f| Constraint::new(f.to_polynomial(), Relation::Ge))
            .collect();
        SemialgebraicSet::new(
            self.dim,
            vec![BasicClosedSet { constraints }],
            Some(self.bounding_box()),
        )
        .expect("polytope constraints are consistent")
    }

    /// The open interior `{h > 0}` as a set, used as a membership oracle.
    pub fn interior_set(&self) -> SemialgebraicSet {
        let constraints = self
            .facets
            .iter()
            .map(|f| Constraint::new(f.to_polynomial(), Relation::Gt))
            .collect();
        SemialgebraicSet::new(
            self.dim,
            vec![BasicClosedSet { constraints }],
            Some(self.bounding_box()),
        )
        .expect("polytope constraints are consistent")
    }

    /// Sampled mutual-containment check of the two descriptions.
    pub fn check_consistency(&self, n: usize, seed: u64) -> Result<f64> {
        let pts = self.sample(n, seed, SampleMode::Barycentric)?;
        let mut worst: f64 = 0.0;
        for p in &pts {
            worst = worst.max(-self.min_facet_value(p));
        }
        for v in &self.vertices {
            worst = worst.max(-self.min_facet_value(v));
        }
        Ok(worst.max(0.0))
    }

    /// Projection by cyclic halfspace projections; exact for one violated
    /// facet, approximate near lower-dimensional faces.
    fn project_impl(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for _ in 0..64 {
            let mut moved = false;
            for f in &self.facets {
                let v = f.eval(&y);
                if v < 0.0 {
                    y = crate::linalg::axpy(&y, -v * (1.0 + 1e-12), &f.coeffs);
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        y
    }
}

fn affine_rank(points: &[Vec<f64>]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    rank(&diffs, 1e-9)
}

/// Points that are the unique solution of their active facets.
fn extreme_points(points: &[Vec<f64>], facets: &[LinearForm], d: usize) -> Vec<Vec<f64>> {
    points
        .iter()
        .filter(|p| {
            let active: Vec<Vec<f64>> = facets
                .iter()
                .filter(|f| f.eval(p).abs() <= INCIDENCE_TOL)
                .map(|f| f.coeffs.clone())
                .collect();
            rank(&active, 1e-9) == d
        })
        .cloned()
        .collect()
}

/// Largest ball inside `{f >= 0 for every f}`; the forms must be unit
/// normalized.
pub fn chebyshev_center(forms: &[LinearForm], dim: usize) -> Result<(Vec<f64>, f64)> {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let xs: Vec<_> = (0..dim)
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let r = lp.add_var(1.0, (0.0, f64::INFINITY));
    for f in forms {
        // a.x + b - r |a| >= 0 with |a| = 1
        let mut expr: Vec<(minilp::Variable, f64)> =
            xs.iter().zip(&f.coeffs).map(|(v, a)| (*v, *a)).collect();
        expr.push((r, -1.0));
        lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, -f.constant);
    }
    let sol = lp.solve().map_err(|e| Error::Lp(e.to_string()))?;
    let center: Vec<f64> = xs.iter().map(|v| sol[*v]).collect();
    Ok((center, sol[r]))
}

impl Region for ConvexPolytope {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && self.facets.iter().all(|f| f.eval(x) >= -tol)
    }

    fn residual(&self, x: &[f64]) -> f64 {
        (-self.min_facet_value(x)).max(0.0)
    }

    fn sample(&self, n: usize, seed: u64, mode: SampleMode) -> Result<Vec<Vec<f64>>> {
        match mode {
            SampleMode::Barycentric => chunked(n, seed, |rng, count| {
                Ok((0..count)
                    .map(|_| combine(&dirichlet(rng, self.vertices.len()), &self.vertices))
                    .collect())
            }),
            SampleMode::Interior if self.is_simplex() => {
                self.sample(n, seed, SampleMode::Barycentric)
            }
            SampleMode::Interior => {
                let (lo, hi) = self.bounding_box();
                rejection(n, seed, &lo, &hi, |x| self.contains(x, 0.0))
            }
            SampleMode::Boundary => {
                let faces: Vec<Vec<Vec<f64>>> =
                    (0..self.facets.len()).map(|i| self.facet_vertices(i)).collect();
                chunked(n, seed, |rng, count| {
                    Ok((0..count)
                        .map(|_| {
                            let k = rand::Rng::random_range(rng, 0..faces.len());
                            combine(&dirichlet(rng, faces[k].len()), &faces[k])
                        })
                        .collect())
                })
            }
        }
    }

    fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some(self.bounding_box())
    }

    fn project(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(self.project_impl(x))
    }

    fn extreme_points(&self) -> Vec<Vec<f64>> {
        self.vertices.clone()
    }
}

#[derive(Serialize, Deserialize)]
struct RawPolytope {
    #[serde(flatten)]
    set: SemialgebraicSet,
    vertices: Vec<Vec<f64>>,
}

impl Serialize for ConvexPolytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawPolytope {
            set: self.to_set(),
            vertices: self.vertices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexPolytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawPolytope::deserialize(d)?;
        let forms = raw
            .set
            .union
            .first()
            .ok_or_else(|| D::Error::custom("polytope without constraints"))?
            .constraints
            .iter()
            .map(|c| LinearForm::from_polynomial(&c.poly))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        ConvexPolytope::new(raw.vertices, forms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolytope {
        ConvexPolytope::from_vertices(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![0.5, 0.5],
        ])
        .unwrap()
    }

    #[test]
    fn hull_drops_interior_points() {
        let sq = unit_square();
        assert_eq!(sq.vertices().len(), 4);
        assert_eq!(sq.facets().len(), 4);
        assert!(sq.contains(&[0.5, 0.2], 0.0));
        assert!(!sq.contains(&[1.5, 0.2], 1e-3));
    }

    #[test]
    fn facets_and_vertices_agree() {
        let sq = unit_square();
        let again = ConvexPolytope::from_facets(sq.facets().to_vec()).unwrap();
        assert_eq!(again.vertices().len(), 4);
        assert!(sq.check_consistency(1000, 1).unwrap() <= 1e-10);
    }

    #[test]
    fn chebyshev_center_of_square() {
        let (c, r) = unit_square().chebyshev_center().unwrap();
        assert!((r - 0.5).abs() < 1e-9);
        assert!((c[0] - 0.5).abs() < 1e-9 && (c[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(ConvexPolytope::from_vertices(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
    }

    #[test]
    fn projection_lands_inside() {
        let sq = unit_square();
        let p = sq.project(&[2.0, 0.5]).unwrap();
        assert!(sq.contains(&p, 1e-12));
        assert!((p[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn json_carries_vertices() {
        let sq = unit_square();
        let v = serde_json::to_value(&sq).unwrap();
        assert!(v.get("vertices").is_some() && v.get("union").is_some());
        let back: ConvexPolytope = serde_json::from_value(v).unwrap();
        assert_eq!(back.vertices(), sq.vertices());
    }
}
