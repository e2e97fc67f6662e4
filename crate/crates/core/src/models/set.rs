//! Finite unions of basic semialgebraic sets.

use serde::{Deserialize, Serialize};

use super::region::{chunked, dirichlet, rejection, unit_sphere, Region, SampleMode};
use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::polycore::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">=0")]
    Ge,
    #[serde(rename = ">0")]
    Gt,
    #[serde(rename = "=0")]
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub poly: Polynomial,
    pub rel: Relation,
}

impl Constraint {
    pub fn new(poly: Polynomial, rel: Relation) -> Self {
        Constraint { poly, rel }
    }

    pub fn holds(&self, x: &[f64], tol: f64) -> bool {
        let g = self.poly.eval(x);
        match self.rel {
            Relation::Ge => g >= -tol,
            Relation::Gt => g > -tol,
            Relation::Eq => g.abs() <= tol,
        }
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        let g = self.poly.eval(x);
        match self.rel {
            Relation::Ge | Relation::Gt => (-g).max(0.0),
            Relation::Eq => g.abs(),
        }
    }

    /// Signed slack: positive inside, for open-set margins.
    pub fn margin(&self, x: &[f64]) -> f64 {
        let g = self.poly.eval(x);
        match self.rel {
            Relation::Ge | Relation::Gt => g,
            Relation::Eq => -g.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasicClosedSet {
    pub constraints: Vec<Constraint>,
}

impl BasicClosedSet {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if let Some(c) = constraints.iter().find(|c| c.poly.dim() != dim) {
            return Err(Error::dim("constraint", dim, c.poly.dim()));
        }
        Ok(BasicClosedSet { constraints })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.constraints.iter().all(|c| c.holds(x, tol))
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.violation(x))
            .fold(0.0, f64::max)
    }

    pub fn margin(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.margin(x))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Direct samplers for sets whose shape is known in closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ShapeHint {
    Ball { center: Vec<f64>, radius: f64 },
    Sphere { center: Vec<f64>, radius: f64 },
    /// The set is the convex hull of these points (possibly lower
    /// dimensional, e.g. the standard simplex).
    Hull { vertices: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemialgebraicSet {
    #[serde(skip)]
    dim: usize,
    pub union: Vec<BasicClosedSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<(Vec<f64>, Vec<f64>)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<ShapeHint>,
}

impl SemialgebraicSet {
    pub fn new(
        dim: usize,
        union: Vec<BasicClosedSet>,
        bbox: Option<(Vec<f64>, Vec<f64>)>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("set dimension must be positive".into()));
        }
        for b in &union {
            for c in &b.constraints {
                if c.poly.dim() != dim {
                    return Err(Error::dim("set constraint", dim, c.poly.dim()));
                }
            }
        }
        if let Some((lo, hi)) = &bbox {
            if lo.len() != dim || hi.len() != dim {
                return Err(Error::dim("bounding box", dim, lo.len()));
            }
        }
        Ok(SemialgebraicSet {
            dim,
            union,
            bbox,
            sampler: None,
        })
    }

    /// A single basic set.
    pub fn basic(dim: usize, constraints: Vec<Constraint>, bbox: Option<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let b = BasicClosedSet::new(dim, constraints)?;
        SemialgebraicSet::new(dim, vec![b], bbox)
    }

    pub fn with_sampler(mut self, hint: ShapeHint) -> Self {
        self.sampler = Some(hint);
        self
    }

    /// Closed ball `|x - c|^2 <= r^2`.
    pub fn ball(center: &[f64], radius: f64) -> Self {
        let d = center.len();
        let poly = radius_poly(center, radius).scale_poly(-1.0);
        let bbox = (
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect(),
        );
        SemialgebraicSet::basic(d, vec![Constraint::new(poly, Relation::Ge)], Some(bbox))
            .expect("ball is well formed")
            .with_sampler(ShapeHint::Ball {
                center: center.to_vec(),
                radius,
            })
    }

    /// Sphere `|x - c|^2 = r^2`.
    pub fn sphere(center: &[f64], radius: f64) -> Self {
        let d = center.len();
        let poly = radius_poly(center, radius);
        let bbox = (
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect(),
        );
        SemialgebraicSet::basic(d, vec![Constraint::new(poly, Relation::Eq)], Some(bbox))
            .expect("sphere is well formed")
            .with_sampler(ShapeHint::Sphere {
                center: center.to_vec(),
                radius,
            })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Smallest signed slack over the union (positive in the interior of
    /// some basic set).
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.union
            .iter()
            .map(|b| b.margin(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let mut s: SemialgebraicSet = serde_json::from_value(v.clone())?;
        let dim = s
            .union
            .iter()
            .flat_map(|b| b.constraints.first())
            .map(|c| c.poly.dim())
            .next()
            .or_else(|| s.bbox.as_ref().map(|b| b.0.len()))
            .ok_or_else(|| Error::InvalidInput("set without constraints or bbox".into()))?;
        s.dim = dim;
        let checked = SemialgebraicSet::new(dim, s.union.clone(), s.bbox.clone())?;
        Ok(SemialgebraicSet {
            sampler: s.sampler,
            ..checked
        })
    }
}

/// `|x - c|^2 - r^2`.
fn radius_poly(center: &[f64], radius: f64) -> Polynomial {
    let d = center.len();
    let mut terms = vec![(vec![0; d], center.iter().map(|c| c * c).sum::<f64>() - radius * radius)];
    for (i, c) in center.iter().enumerate() {
        let mut e2 = vec![0; d];
        e2[i] = 2;
        terms.push((e2, 1.0));
        let mut e1 = vec![0; d];
        e1[i] = 1;
        terms.push((e1, -2.0 * c));
    }
    Polynomial::new(d, terms).expect("radius polynomial is well formed")
}

impl Region for SemialgebraicSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && self.union.iter().any(|b| b.contains(x, tol))
    }

    fn residual(&self, x: &[f64]) -> f64 {
        self.union
            .iter()
            .map(|b| b.violation(x))
            .fold(f64::INFINITY, f64::min)
    }

    fn sample(&self, n: usize, seed: u64, mode: SampleMode) -> Result<Vec<Vec<f64>>> {
        let d = self.dim;
        match (&self.sampler, mode) {
            (Some(ShapeHint::Hull { vertices }), SampleMode::Interior | SampleMode::Barycentric) => {
                chunked(n, seed, |rng, count| {
                    Ok((0..count)
                        .map(|_| crate::linalg::combine(&dirichlet(rng, vertices.len()), vertices))
                        .collect())
                })
            }
            (_, SampleMode::Barycentric) => Err(Error::Unsupported(
                "barycentric sampling needs a polytope".into(),
            )),
            (Some(ShapeHint::Ball { center, radius }), SampleMode::Interior) => {
                chunked(n, seed, |rng, count| {
                    Ok((0..count)
                        .map(|_| {
                            let u = unit_sphere(rng, d);
                            let r = radius * rand::Rng::random::<f64>(rng).powf(1.0 / d as f64);
                            center.iter().zip(&u).map(|(c, x)| c + r * x).collect()
                        })
                        .collect())
                })
            }
            (
                Some(ShapeHint::Ball { center, radius } | ShapeHint::Sphere { center, radius }),
                _,
            ) => chunked(n, seed, |rng, count| {
                Ok((0..count)
                    .map(|_| {
                        let u = unit_sphere(rng, d);
                        center.iter().zip(&u).map(|(c, x)| c + radius * x).collect()
                    })
                    .collect())
            }),
            (Some(ShapeHint::Hull { .. }), SampleMode::Boundary) => Err(Error::Unsupported(
                "boundary sampling of a hull set needs a polytope".into(),
            )),
            (None, SampleMode::Interior) => {
                let (lo, hi) = self.bbox.clone().ok_or_else(|| {
                    Error::Unsupported("rejection sampling needs a bounding box".into())
                })?;
                rejection(n, seed, &lo, &hi, |x| self.contains(x, 0.0))
            }
            (None, SampleMode::Boundary) => Err(Error::Unsupported(
                "boundary sampling needs a polytope or a ball/sphere".into(),
            )),
        }
    }

    fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.bbox.clone()
    }

    fn project(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.sampler {
            Some(ShapeHint::Ball { center, radius }) => {
                let v = crate::linalg::sub(x, center);
                let r = norm(&v);
                if r <= *radius {
                    Some(x.to_vec())
                } else {
                    // slightly inside so that the raw polynomial test passes
                    let s = radius / r * (1.0 - 1e-15);
                    Some(center.iter().zip(&v).map(|(c, y)| c + s * y).collect())
                }
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_membership_uses_raw_polynomial() {
        let b = SemialgebraicSet::ball(&[0.0, 0.0], 1.0);
        assert!(b.contains(&[1.0, 0.0], 0.0));
        assert!(!b.contains(&[1.1, 0.0], 0.05));
        assert!(b.contains(&[1.1, 0.0], 0.25));
        assert!((b.residual(&[1.1, 0.0]) - 0.21).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_keeps_structure() {
        let s = SemialgebraicSet::sphere(&[0.0, 0.0], 1.0);
        let v = serde_json::to_value(&s).unwrap();
        assert!(v.get("union").is_some() && v.get("bbox").is_some());
        assert_eq!(v["union"][0]["constraints"][0]["rel"], "=0");
        let back = SemialgebraicSet::from_json(&v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejection_sampler_respects_set() {
        let square = SemialgebraicSet::basic(
            2,
            vec![Constraint::new(Polynomial::affine(&[1.0, 1.0], 0.0), Relation::Gt)],
            Some((vec![-1.0, -1.0], vec![1.0, 1.0])),
        )
        .unwrap();
        let pts = square.sample(500, 3, SampleMode::Interior).unwrap();
        assert!(pts.iter().all(|p| p[0] + p[1] > 0.0));
        assert!(square.sample(5, 3, SampleMode::Boundary).is_err());
    }

    #[test]
    fn hopeless_rejection_hits_budget() {
        let thin = SemialgebraicSet::basic(
            1,
            vec![Constraint::new(Polynomial::affine(&[1.0], -2.0), Relation::Ge)],
            Some((vec![0.0], vec![1.0])),
        )
        .unwrap();
        assert!(matches!(
            thin.sample(1, 0, SampleMode::Interior),
            Err(Error::RejectionBudget { .. })
        ));
    }
}
