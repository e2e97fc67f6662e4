//! Expression trees for polynomial and Nash maps `R^n -> R^m`.
//!
//! Maps stay factored: evaluation walks the tree, so high powers such as
//! `(t - R^2)^14` are never expanded unless [`MapExpr::expand`] is asked to.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::polynomial::Polynomial;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Node payload. Leaves carry their data; inner nodes combine children.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Coordinate { index: usize },
    Constant { value: Vec<f64> },
    /// `x -> M x + b`, `M` stored row-major as `m` rows of length `n`.
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    Polynomial { components: Vec<Polynomial> },
    Sum,
    /// Componentwise product; children of codomain 1 broadcast.
    Product,
    ScalarMultiple { factor: f64 },
    /// `children[0] o children[1] o ... o children[k-1]`.
    Composition,
    Power { exponent: u32 },
    NormSquare,
    EuclideanNorm,
    Reciprocal,
    Root { degree: u32 },
}

impl Node {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Node::Coordinate { .. } => "coordinate",
            Node::Constant { .. } => "constant",
            Node::Affine { .. } => "affine",
            Node::Polynomial { .. } => "polynomial",
            Node::Sum => "sum",
            Node::Product => "product",
            Node::ScalarMultiple { .. } => "scalar_multiple",
            Node::Composition => "composition",
            Node::Power { .. } => "power",
            Node::NormSquare => "norm_square",
            Node::EuclideanNorm => "euclidean_norm",
            Node::Reciprocal => "reciprocal",
            Node::Root { .. } => "root",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapExpr {
    node: Node,
    children: Vec<MapExpr>,
    domain_dim: usize,
    codomain_dim: usize,
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidMap(format!("non-finite entry in {what}")))
    }
}

impl MapExpr {
    pub fn coordinate(domain_dim: usize, index: usize) -> Result<Self> {
        if index >= domain_dim {
            return Err(Error::InvalidMap(format!(
                "coordinate {index} out of range for dimension {domain_dim}"
            )));
        }
        Ok(MapExpr {
            node: Node::Coordinate { index },
            children: vec![],
            domain_dim,
            codomain_dim: 1,
        })
    }

    pub fn constant(domain_dim: usize, value: Vec<f64>) -> Result<Self> {
        if domain_dim == 0 || value.is_empty() {
            return Err(Error::InvalidMap("constant needs positive dimensions".into()));
        }
        check_finite(&value, "constant")?;
        let codomain_dim = value.len();
        Ok(MapExpr {
            node: Node::Constant { value },
            children: vec![],
            domain_dim,
            codomain_dim,
        })
    }

    pub fn affine(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        let m = matrix.len();
        if m == 0 || offset.len() != m {
            return Err(Error::InvalidMap("affine matrix/offset shape".into()));
        }
        let n = matrix[0].len();
        if n == 0 || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMap("ragged affine matrix".into()));
        }
        for r in &matrix {
            check_finite(r, "affine matrix")?;
        }
        check_finite(&offset, "affine offset")?;
        Ok(MapExpr {
            node: Node::Affine { matrix, offset },
            children: vec![],
            domain_dim: n,
            codomain_dim: m,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let matrix = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        MapExpr::affine(matrix, vec![0.0; dim]).expect("identity is well formed")
    }

    pub fn polynomial(components: Vec<Polynomial>) -> Result<Self> {
        let n = components
            .first()
            .ok_or_else(|| Error::InvalidMap("polynomial map without components".into()))?
            .dim();
        if let Some(p) = components.iter().find(|p| p.dim() != n) {
            return Err(Error::dim("polynomial components", n, p.dim()));
        }
        let m = components.len();
        Ok(MapExpr {
            node: Node::Polynomial { components },
            children: vec![],
            domain_dim: n,
            codomain_dim: m,
        })
    }

    pub fn sum(children: Vec<MapExpr>) -> Result<Self> {
        let first = children
            .first()
            .ok_or_else(|| Error::InvalidMap("empty sum".into()))?;
        let (n, m) = (first.domain_dim, first.codomain_dim);
        for c in &children {
            if c.domain_dim != n {
                return Err(Error::dim("sum domain", n, c.domain_dim));
            }
            if c.codomain_dim != m {
                return Err(Error::dim("sum codomain", m, c.codomain_dim));
            }
        }
        Ok(MapExpr {
            node: Node::Sum,
            children,
            domain_dim: n,
            codomain_dim: m,
        })
    }

    pub fn product(children: Vec<MapExpr>) -> Result<Self> {
        let n = children
            .first()
            .ok_or_else(|| Error::InvalidMap("empty product".into()))?
            .domain_dim;
        let mut m = 1;
        for c in &children {
            if c.domain_dim != n {
                return Err(Error::dim("product domain", n, c.domain_dim));
            }
            if c.codomain_dim != 1 {
                if m != 1 && m != c.codomain_dim {
                    return Err(Error::dim("product codomain", m, c.codomain_dim));
                }
                m = c.codomain_dim;
            }
        }
        Ok(MapExpr {
            node: Node::Product,
            children,
            domain_dim: n,
            codomain_dim: m,
        })
    }

    pub fn scalar_multiple(factor: f64, child: MapExpr) -> Result<Self> {
        check_finite(&[factor], "scalar multiple")?;
        Ok(Self::unary(Node::ScalarMultiple { factor }, child, None))
    }

    /// Composition of an explicit chain `f1 o f2 o ... o fk`, kept as given.
    pub fn composition(chain: Vec<MapExpr>) -> Result<Self> {
        if chain.len() < 2 {
            return Err(Error::InvalidMap("composition needs at least two maps".into()));
        }
        for w in chain.windows(2) {
            if w[1].codomain_dim != w[0].domain_dim {
                return Err(Error::dim("composition link", w[0].domain_dim, w[1].codomain_dim));
            }
        }
        let domain_dim = chain.last().unwrap().domain_dim;
        let codomain_dim = chain[0].codomain_dim;
        Ok(MapExpr {
            node: Node::Composition,
            children: chain,
            domain_dim,
            codomain_dim,
        })
    }

    pub fn power(child: MapExpr, exponent: u32) -> Self {
        Self::unary(Node::Power { exponent }, child, None)
    }

    pub fn norm_square(child: MapExpr) -> Self {
        Self::unary(Node::NormSquare, child, Some(1))
    }

    pub fn euclidean_norm(child: MapExpr) -> Self {
        Self::unary(Node::EuclideanNorm, child, Some(1))
    }

    pub fn reciprocal(child: MapExpr) -> Self {
        Self::unary(Node::Reciprocal, child, None)
    }

    pub fn root(child: MapExpr, degree: u32) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidMap("root of degree 0".into()));
        }
        Ok(Self::unary(Node::Root { degree }, child, None))
    }

    fn unary(node: Node, child: MapExpr, codomain: Option<usize>) -> Self {
        let domain_dim = child.domain_dim;
        let codomain_dim = codomain.unwrap_or(child.codomain_dim);
        MapExpr {
            node,
            children: vec![child],
            domain_dim,
            codomain_dim,
        }
    }

    /// Vector map whose `k`-th component is the scalar map `parts[k]`.
    pub fn stack(parts: Vec<MapExpr>) -> Result<Self> {
        let m = parts.len();
        if m == 0 {
            return Err(Error::InvalidMap("empty stack".into()));
        }
        if let Some(p) = parts.iter().find(|p| p.codomain_dim != 1) {
            return Err(Error::dim("stacked component", 1, p.codomain_dim));
        }
        if m == 1 {
            return Ok(parts.into_iter().next().unwrap());
        }
        let n = parts[0].domain_dim;
        let terms = parts
            .into_iter()
            .enumerate()
            .map(|(k, p)| {
                let mut e = vec![0.0; m];
                e[k] = 1.0;
                MapExpr::product(vec![p, MapExpr::constant(n, e)?])
            })
            .collect::<Result<Vec<_>>>()?;
        MapExpr::sum(terms)
    }

    /// The `i`-th component of `self` as a scalar map.
    pub fn component(&self, i: usize) -> Result<Self> {
        compose(&MapExpr::coordinate(self.codomain_dim, i)?, self)
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn children(&self) -> &[MapExpr] {
        &self.children
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    /// True iff no euclidean-norm, reciprocal or root node occurs.
    pub fn is_polynomial(&self) -> bool {
        !matches!(
            self.node,
            Node::EuclideanNorm | Node::Reciprocal | Node::Root { .. }
        ) && self.children.iter().all(MapExpr::is_polynomial)
    }

    fn first_nash_node(&self) -> Option<&'static str> {
        match self.node {
            Node::EuclideanNorm | Node::Reciprocal | Node::Root { .. } => {
                Some(self.node.kind_name())
            }
            _ => self.children.iter().find_map(MapExpr::first_nash_node),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(MapExpr::size).sum::<usize>()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.domain_dim {
            return Err(Error::dim("eval point", self.domain_dim, x.len()));
        }
        self.eval_generic(x)
    }

    /// Structured evaluation over any [`Scalar`]; `x` must be non-empty and of
    /// length `domain_dim`.
    pub fn eval_generic<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.domain_dim {
            return Err(Error::dim("eval point", self.domain_dim, x.len()));
        }
        let proto = &x[0];
        Ok(match &self.node {
            Node::Coordinate { index } => vec![x[*index].clone()],
            Node::Constant { value } => value.iter().map(|v| proto.lift(*v)).collect(),
            Node::Affine { matrix, offset } => matrix
                .iter()
                .zip(offset)
                .map(|(row, b)| {
                    let mut acc = proto.lift(*b);
                    for (a, xi) in row.iter().zip(x) {
                        if *a == 1.0 {
                            acc = acc.add(xi);
                        } else if *a != 0.0 {
                            acc = acc.add(&xi.scale(*a));
                        }
                    }
                    acc
                })
                .collect(),
            Node::Polynomial { components } => {
                components.iter().map(|p| p.eval_generic(x)).collect()
            }
            Node::Sum => {
                let mut acc = self.children[0].eval_generic(x)?;
                for c in &self.children[1..] {
                    let v = c.eval_generic(x)?;
                    for (a, b) in acc.iter_mut().zip(&v) {
                        *a = a.add(b);
                    }
                }
                acc
            }
            Node::Product => {
                let mut acc: Vec<S> = vec![proto.lift(1.0); self.codomain_dim];
                let mut first = true;
                for c in &self.children {
                    let v = c.eval_generic(x)?;
                    if first {
                        acc = if v.len() == 1 {
                            vec![v[0].clone(); self.codomain_dim]
                        } else {
                            v
                        };
                        first = false;
                    } else if v.len() == 1 {
                        for a in acc.iter_mut() {
                            *a = a.mul(&v[0]);
                        }
                    } else {
                        for (a, b) in acc.iter_mut().zip(&v) {
                            *a = a.mul(b);
                        }
                    }
                }
                acc
            }
            Node::ScalarMultiple { factor } => self.children[0]
                .eval_generic(x)?
                .iter()
                .map(|v| v.scale(*factor))
                .collect(),
            Node::Composition => {
                let mut v = self.children.last().unwrap().eval_generic(x)?;
                for c in self.children.iter().rev().skip(1) {
                    v = c.eval_generic(&v)?;
                }
                v
            }
            Node::Power { exponent } => self.children[0]
                .eval_generic(x)?
                .iter()
                .map(|v| v.powi(*exponent))
                .collect(),
            Node::NormSquare => vec![norm_square(&self.children[0].eval_generic(x)?)],
            Node::EuclideanNorm => {
                let n2 = norm_square(&self.children[0].eval_generic(x)?);
                vec![n2.root(2).map_err(|_| Error::Pole {
                    node: "euclidean_norm",
                    value: n2.value(),
                })?]
            }
            Node::Reciprocal => self.children[0]
                .eval_generic(x)?
                .iter()
                .map(|v| v.recip())
                .collect::<Result<_>>()?,
            Node::Root { degree } => self.children[0]
                .eval_generic(x)?
                .iter()
                .map(|v| v.root(*degree))
                .collect::<Result<_>>()?,
        })
    }

    /// Sparse expansion of every component in the domain variables.
    pub fn expand(&self) -> Result<Vec<Polynomial>> {
        if let Some(kind) = self.first_nash_node() {
            return Err(Error::NonPolynomial(kind));
        }
        let vars: Vec<Polynomial> = (0..self.domain_dim)
            .map(|i| Polynomial::variable(self.domain_dim, i))
            .collect();
        self.eval_generic(&vars)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("map expressions always serialize")
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        Ok(serde_json::from_value(value.clone())?)
    }
}

fn norm_square<S: Scalar>(v: &[S]) -> S {
    let mut acc = v[0].mul(&v[0]);
    for y in &v[1..] {
        acc = acc.add(&y.mul(y));
    }
    acc
}

/// `outer o inner`, flattening nested composition chains.
pub fn compose(outer: &MapExpr, inner: &MapExpr) -> Result<MapExpr> {
    if inner.codomain_dim != outer.domain_dim {
        return Err(Error::dim("compose", outer.domain_dim, inner.codomain_dim));
    }
    let mut chain = Vec::new();
    for m in [outer, inner] {
        if matches!(m.node, Node::Composition) {
            chain.extend(m.children.iter().cloned());
        } else {
            chain.push(m.clone());
        }
    }
    MapExpr::composition(chain)
}

pub fn eval(map: &MapExpr, point: &[f64]) -> Result<Vec<f64>> {
    map.eval(point)
}

pub fn expand(map: &MapExpr) -> Result<Vec<Polynomial>> {
    map.expand()
}

#[derive(Serialize, Deserialize)]
struct RawNode {
    kind: String,
    #[serde(default)]
    children: Vec<RawNode>,
    #[serde(default)]
    data: Value,
}

impl From<&MapExpr> for RawNode {
    fn from(m: &MapExpr) -> Self {
        let mut data = match &m.node {
            Node::Coordinate { index } => json!({ "index": index }),
            Node::Constant { value } => json!({ "value": value }),
            Node::Affine { matrix, offset } => json!({ "matrix": matrix, "offset": offset }),
            Node::Polynomial { components } => json!({ "components": components }),
            Node::ScalarMultiple { factor } => json!({ "factor": factor }),
            Node::Power { exponent } => json!({ "exponent": exponent }),
            Node::Root { degree } => json!({ "degree": degree }),
            _ => json!({}),
        };
        data["domain_dim"] = json!(m.domain_dim);
        data["codomain_dim"] = json!(m.codomain_dim);
        RawNode {
            kind: m.node.kind_name().to_string(),
            children: m.children.iter().map(RawNode::from).collect(),
            data,
        }
    }
}

fn field<T: serde::de::DeserializeOwned>(data: &Value, key: &str, kind: &str) -> Result<T> {
    let v = data
        .get(key)
        .ok_or_else(|| Error::InvalidMap(format!("{kind} node lacks data.{key}")))?;
    Ok(serde_json::from_value(v.clone())?)
}

impl TryFrom<RawNode> for MapExpr {
    type Error = Error;
    fn try_from(raw: RawNode) -> Result<Self> {
        let kind = raw.kind.as_str();
        let data = &raw.data;
        let mut children = raw
            .children
            .into_iter()
            .map(MapExpr::try_from)
            .collect::<Result<Vec<_>>>()?;
        let leaf = |children: &Vec<MapExpr>| -> Result<()> {
            if children.is_empty() {
                Ok(())
            } else {
                Err(Error::InvalidMap(format!("{kind} node cannot have children")))
            }
        };
        let single = |children: &mut Vec<MapExpr>| -> Result<MapExpr> {
            if children.len() == 1 {
                Ok(children.pop().unwrap())
            } else {
                Err(Error::InvalidMap(format!("{kind} node needs exactly one child")))
            }
        };
        let map = match kind {
            "coordinate" => {
                leaf(&children)?;
                MapExpr::coordinate(field(data, "domain_dim", kind)?, field(data, "index", kind)?)?
            }
            "constant" => {
                leaf(&children)?;
                MapExpr::constant(field(data, "domain_dim", kind)?, field(data, "value", kind)?)?
            }
            "affine" => {
                leaf(&children)?;
                MapExpr::affine(field(data, "matrix", kind)?, field(data, "offset", kind)?)?
            }
            "polynomial" => {
                leaf(&children)?;
                MapExpr::polynomial(field(data, "components", kind)?)?
            }
            "sum" => MapExpr::sum(children)?,
            "product" => MapExpr::product(children)?,
            "composition" => MapExpr::composition(children)?,
            "scalar_multiple" => {
                MapExpr::scalar_multiple(field(data, "factor", kind)?, single(&mut children)?)?
            }
            "power" => MapExpr::power(single(&mut children)?, field(data, "exponent", kind)?),
            "norm_square" => MapExpr::norm_square(single(&mut children)?),
            "euclidean_norm" => MapExpr::euclidean_norm(single(&mut children)?),
            "reciprocal" => MapExpr::reciprocal(single(&mut children)?),
            "root" => MapExpr::root(single(&mut children)?, field(data, "degree", kind)?)?,
            other => return Err(Error::InvalidMap(format!("unknown node kind {other:?}"))),
        };
        for (key, actual) in [("domain_dim", map.domain_dim), ("codomain_dim", map.codomain_dim)] {
            if let Some(v) = data.get(key) {
                let declared: usize = serde_json::from_value(v.clone())?;
                if declared != actual {
                    return Err(Error::dim(format!("{kind} {key}"), declared, actual));
                }
            }
        }
        Ok(map)
    }
}

impl Serialize for MapExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawNode::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MapExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawNode::deserialize(d)?;
        MapExpr::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::scalar::Scalar;

    fn square_minus_8() -> MapExpr {
        let t = MapExpr::affine(vec![vec![1.0]], vec![-8.0]).unwrap();
        MapExpr::power(t, 2)
    }

    #[test]
    fn identity_evaluates_to_input() {
        assert_eq!(MapExpr::identity(2).eval(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn expand_binomial() {
        let p = square_minus_8().expand().unwrap();
        assert_eq!(p[0], Polynomial::univariate(&[64.0, -16.0, 1.0]));
        let aff = MapExpr::affine(vec![vec![2.0]], vec![-1.0]).unwrap();
        assert_eq!(aff.expand().unwrap()[0], Polynomial::univariate(&[-1.0, 2.0]));
    }

    #[test]
    fn expand_rejects_nash_nodes() {
        let r = MapExpr::reciprocal(MapExpr::identity(1));
        assert!(!r.is_polynomial());
        assert!(matches!(r.expand(), Err(Error::NonPolynomial("reciprocal"))));
    }

    #[test]
    fn product_broadcasts_scalars() {
        let x = MapExpr::identity(2);
        let n2 = MapExpr::norm_square(x.clone());
        let g = MapExpr::product(vec![n2, x]).unwrap();
        assert_eq!(g.codomain_dim(), 2);
        assert_eq!(g.eval(&[1.0, 2.0]).unwrap(), vec![5.0, 10.0]);
    }

    #[test]
    fn compose_checks_dimensions() {
        let f = MapExpr::identity(2);
        let g = MapExpr::identity(3);
        assert!(matches!(compose(&f, &g), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn stack_builds_vector_maps() {
        let x = MapExpr::coordinate(2, 0).unwrap();
        let y = MapExpr::coordinate(2, 1).unwrap();
        let s = MapExpr::stack(vec![y, x]).unwrap();
        assert_eq!(s.eval(&[1.0, 2.0]).unwrap(), vec![2.0, 1.0]);
    }

    #[test]
    fn poles_surface_as_errors() {
        let r = MapExpr::reciprocal(MapExpr::identity(1));
        assert!(matches!(r.eval(&[0.0]), Err(Error::Pole { .. })));
        let s = MapExpr::root(MapExpr::identity(1), 3).unwrap();
        assert!(matches!(s.eval(&[-1.0]), Err(Error::Pole { .. })));
        let n = MapExpr::euclidean_norm(MapExpr::identity(2));
        assert!(n.eval(&[0.0, 0.0]).is_err());
        assert_eq!(n.eval(&[3.0, 4.0]).unwrap(), vec![5.0]);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m = MapExpr::product(vec![
            MapExpr::root(MapExpr::norm_square(MapExpr::identity(2)), 2).unwrap(),
            MapExpr::scalar_multiple(0.1, MapExpr::identity(2)).unwrap(),
        ])
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: MapExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
        let bad = r#"{"kind":"sum","children":[],"data":{}}"#;
        assert!(serde_json::from_str::<MapExpr>(bad).is_err());
        let wrong_dim = r#"{"kind":"coordinate","children":[],"data":{"index":0,"domain_dim":2,"codomain_dim":3}}"#;
        assert!(serde_json::from_str::<MapExpr>(wrong_dim).is_err());
    }

    #[test]
    fn polynomial_scalar_value_is_constant_term() {
        let p = Polynomial::univariate(&[2.0, 1.0]);
        assert_eq!(p.value(), 2.0);
    }
}
