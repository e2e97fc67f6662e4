//! The compact models: ball, sphere, simplices, cube, cylinder, prism.

use serde::{Deserialize, Serialize};

use super::polytope::ConvexPolytope;
use super::region::{Region, SampleMode};
use super::set::{Constraint, Relation, SemialgebraicSet, ShapeHint};
use crate::error::{Error, Result};
use crate::polycore::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ball,
    Sphere,
    SimplexSolid,
    SimplexStd,
    Hypercube,
    Cylinder,
    Prism,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Ball,
        ModelKind::Sphere,
        ModelKind::SimplexSolid,
        ModelKind::SimplexStd,
        ModelKind::Hypercube,
        ModelKind::Cylinder,
        ModelKind::Prism,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Ball => "ball",
            ModelKind::Sphere => "sphere",
            ModelKind::SimplexSolid => "simplex_solid",
            ModelKind::SimplexStd => "simplex_std",
            ModelKind::Hypercube => "hypercube",
            ModelKind::Cylinder => "cylinder",
            ModelKind::Prism => "prism",
        }
    }

    /// Dimension of the ambient space for intrinsic dimension `d`.
    pub fn ambient_dim(&self, d: usize) -> usize {
        match self {
            ModelKind::Sphere | ModelKind::SimplexStd => d + 1,
            _ => d,
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::InvalidInput(format!("unknown model kind {s:?}")))
    }
}

/// A model is either a polytope or a general set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Model {
    Polytope(ConvexPolytope),
    Set(SemialgebraicSet),
}

impl Model {
    pub fn as_polytope(&self) -> Option<&ConvexPolytope> {
        match self {
            Model::Polytope(p) => Some(p),
            Model::Set(_) => None,
        }
    }

    pub fn region(&self) -> &dyn Region {
        match self {
            Model::Polytope(p) => p,
            Model::Set(s) => s,
        }
    }
}

impl Region for Model {
    fn dim(&self) -> usize {
        self.region().dim()
    }
    fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.region().contains(x, tol)
    }
    fn residual(&self, x: &[f64]) -> f64 {
        self.region().residual(x)
    }
    fn sample(&self, n: usize, seed: u64, mode: SampleMode) -> Result<Vec<Vec<f64>>> {
        self.region().sample(n, seed, mode)
    }
    fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.region().bbox()
    }
    fn project(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.region().project(x)
    }
    fn extreme_points(&self) -> Vec<Vec<f64>> {
        self.region().extreme_points()
    }
}

fn unit(d: usize, i: usize, s: f64) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = s;
    e
}

/// The solid simplex `{x >= 0, sum x <= 1}` in `R^d`.
pub fn solid_simplex(d: usize) -> ConvexPolytope {
    let mut v = vec![vec![0.0; d]];
    v.extend((0..d).map(|i| unit(d, i, 1.0)));
    ConvexPolytope::simplex(v).expect("standard simplex is non-degenerate")
}

/// `[-1, 1]^d`.
pub fn hypercube(d: usize) -> ConvexPolytope {
    let vertices = (0..1usize << d)
        .map(|mask| {
            (0..d)
                .map(|j| if mask >> j & 1 == 1 { 1.0 } else { -1.0 })
                .collect()
        })
        .collect();
    ConvexPolytope::from_vertices(vertices).expect("cube is non-degenerate")
}

/// `Delta_{d-1} x [-1, 1]` in `R^d`.
pub fn prism(d: usize) -> ConvexPolytope {
    if d == 1 {
        return hypercube(1);
    }
    let base = solid_simplex(d - 1);
    let mut vertices = Vec::new();
    for s in [-1.0, 1.0] {
        for v in base.vertices() {
            let mut p = v.clone();
            p.push(s);
            vertices.push(p);
        }
    }
    ConvexPolytope::from_vertices(vertices).expect("prism is non-degenerate")
}

/// `B_{d-1} x [-1, 1]` in `R^d`.
pub fn cylinder(d: usize) -> SemialgebraicSet {
    let mut constraints = Vec::new();
    if d > 1 {
        let terms = (0..d - 1)
            .map(|i| {
                let mut e = vec![0; d];
                e[i] = 2;
                (e, -1.0)
            })
            .chain([(vec![0; d], 1.0)]);
        constraints.push(Constraint::new(Polynomial::new(d, terms).unwrap(), Relation::Ge));
    }
    let mut e = vec![0; d];
    e[d - 1] = 2;
    let height = Polynomial::new(d, [(e, -1.0), (vec![0; d], 1.0)]).unwrap();
    constraints.push(Constraint::new(height, Relation::Ge));
    SemialgebraicSet::basic(d, constraints, Some((vec![-1.0; d], vec![1.0; d])))
        .expect("cylinder is well formed")
}

/// `Delta_d = {lambda >= 0, sum lambda = 1}` in `R^{d+1}`.
pub fn standard_simplex(d: usize) -> SemialgebraicSet {
    let n = d + 1;
    let mut constraints: Vec<Constraint> = (0..n)
        .map(|i| Constraint::new(Polynomial::variable(n, i), Relation::Ge))
        .collect();
    constraints.push(Constraint::new(
        Polynomial::affine(&vec![1.0; n], -1.0),
        Relation::Eq,
    ));
    let vertices = (0..n).map(|i| unit(n, i, 1.0)).collect();
    SemialgebraicSet::basic(n, constraints, Some((vec![0.0; n], vec![1.0; n])))
        .expect("standard simplex is well formed")
        .with_sampler(ShapeHint::Hull { vertices })
}

/// The model of `kind` with intrinsic dimension `d`. The sphere is
/// `S^d` in `R^{d+1}` and the standard simplex `Delta_d` in `R^{d+1}`.
pub fn model(kind: ModelKind, d: usize) -> Result<Model> {
    if d == 0 {
        return Err(Error::InvalidInput("model dimension must be at least 1".into()));
    }
    Ok(match kind {
        ModelKind::Ball => Model::Set(SemialgebraicSet::ball(&vec![0.0; d], 1.0)),
        ModelKind::Sphere => Model::Set(SemialgebraicSet::sphere(&vec![0.0; d + 1], 1.0)),
        ModelKind::SimplexSolid => Model::Polytope(solid_simplex(d)),
        ModelKind::SimplexStd => Model::Set(standard_simplex(d)),
        ModelKind::Hypercube => Model::Polytope(hypercube(d)),
        ModelKind::Cylinder => Model::Set(cylinder(d)),
        ModelKind::Prism => Model::Polytope(prism(d)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solid_simplex_facets() {
        let s = solid_simplex(2);
        for p in [[0.2, 0.3], [0.0, 0.0], [0.5, 0.5]] {
            assert!(s.contains(&p, 0.0));
        }
        assert!(!s.contains(&[0.6, 0.6], 0.0));
        assert!(!s.contains(&[-0.1, 0.3], 0.0));
        assert_eq!(s.facets().len(), 3);
    }

    #[test]
    fn one_dimensional_models_are_the_interval() {
        for kind in [ModelKind::Hypercube, ModelKind::Cylinder, ModelKind::Prism] {
            let m = model(kind, 1).unwrap();
            assert!(m.contains(&[1.0], 0.0) && m.contains(&[-1.0], 0.0));
            assert!(!m.contains(&[1.01], 0.0));
        }
    }

    #[test]
    fn cube_and_prism_shapes() {
        assert_eq!(hypercube(3).vertices().len(), 8);
        assert_eq!(hypercube(3).facets().len(), 6);
        assert_eq!(prism(3).vertices().len(), 6);
        assert_eq!(prism(3).facets().len(), 5);
    }

    #[test]
    fn sphere_boundary_samples() {
        let s = model(ModelKind::Sphere, 1).unwrap();
        let pts = s.sample(360, 7, SampleMode::Boundary).unwrap();
        assert_eq!(pts.len(), 360);
        for p in pts {
            assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn standard_simplex_sampling() {
        let s = model(ModelKind::SimplexStd, 2).unwrap();
        for p in s.sample(200, 1, SampleMode::Barycentric).unwrap() {
            assert!(s.contains(&p, 1e-12));
        }
    }

    #[test]
    fn kind_names_parse() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("torus".parse::<ModelKind>().is_err());
    }
}
