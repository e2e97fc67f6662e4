//! Univariate vector-valued paths: piecewise local polynomials, Newton and
//! Chebyshev forms, and anchor-flat corrections.
//!
//! Every form evaluates over any [`Scalar`], so jets come from Taylor
//! arithmetic rather than symbolic differentiation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycore::{Jet, MapExpr, Polynomial, Scalar, Taylor};

/// `sum_k coeffs[k] (t - center)^k`, vector coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalPoly {
    pub center: f64,
    pub coeffs: Vec<Vec<f64>>,
}

impl LocalPoly {
    pub fn new(center: f64, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        let dim = coeffs
            .first()
            .ok_or_else(|| Error::InvalidInput("empty local polynomial".into()))?
            .len();
        if coeffs.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidInput("ragged local polynomial".into()));
        }
        Ok(LocalPoly { center, coeffs })
    }

    /// The segment from `p` at `t0` to `q` at `t1`.
    pub fn segment(t0: f64, p: &[f64], t1: f64, q: &[f64]) -> Self {
        let slope = p.iter().zip(q).map(|(a, b)| (b - a) / (t1 - t0)).collect();
        LocalPoly {
            center: t0,
            coeffs: vec![p.to_vec(), slope],
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn eval_generic<S: Scalar>(&self, t: &S) -> Vec<S> {
        let s = t.sub(&t.lift(self.center));
        let n = self.coeffs.len();
        (0..self.dim())
            .map(|j| {
                let mut acc = t.lift(self.coeffs[n - 1][j]);
                for k in (0..n - 1).rev() {
                    acc = acc.mul(&s).add(&t.lift(self.coeffs[k][j]));
                }
                acc
            })
            .collect()
    }
}

/// Pieces on `[breaks[i], breaks[i+1]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePath {
    pub breaks: Vec<f64>,
    pub pieces: Vec<LocalPoly>,
}

impl PiecewisePath {
    pub fn new(breaks: Vec<f64>, pieces: Vec<LocalPoly>) -> Result<Self> {
        if pieces.is_empty() || breaks.len() != pieces.len() + 1 {
            return Err(Error::InvalidInput("piecewise path needs n pieces and n+1 breaks".into()));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("breakpoints must increase".into()));
        }
        let dim = pieces[0].dim();
        if pieces.iter().any(|p| p.dim() != dim) {
            return Err(Error::InvalidInput("pieces of different dimension".into()));
        }
        Ok(PiecewisePath { breaks, pieces })
    }

    pub fn piece_index(&self, t: f64) -> usize {
        let n = self.pieces.len();
        let mut i = 0;
        while i + 1 < n && t >= self.breaks[i + 1] {
            i += 1;
        }
        i
    }

    /// Interior breakpoints (where the pieces meet).
    pub fn interior_breaks(&self) -> &[f64] {
        &self.breaks[1..self.breaks.len() - 1]
    }

    /// Largest jump in value across interior breakpoints.
    pub fn continuity_gap(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.pieces.len() - 1 {
            let t = self.breaks[i + 1];
            let a = self.pieces[i].eval_generic(&t);
            let b = self.pieces[i + 1].eval_generic(&t);
            worst = worst.max(crate::linalg::dist(&a, &b));
        }
        worst
    }
}

/// Newton form `sum_k c_k prod_{j<k} (t - z_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonPoly {
    pub nodes: Vec<f64>,
    pub coeffs: Vec<Vec<f64>>,
}

impl NewtonPoly {
    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval_generic<S: Scalar>(&self, t: &S) -> Vec<S> {
        let n = self.coeffs.len();
        (0..self.dim())
            .map(|j| {
                let mut acc = t.lift(self.coeffs[n - 1][j]);
                for k in (0..n - 1).rev() {
                    acc = acc.mul(&t.sub(&t.lift(self.nodes[k]))).add(&t.lift(self.coeffs[k][j]));
                }
                acc
            })
            .collect()
    }
}

/// Chebyshev series on `[a, b]`, vector coefficients per degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<Vec<f64>>,
}

impl ChebSeries {
    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Clenshaw over all components at once.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let s = (2.0 * t - self.a - self.b) / (self.b - self.a);
        let dim = self.dim();
        let mut b1 = vec![0.0; dim];
        let mut b2 = vec![0.0; dim];
        for c in self.coeffs[1..].iter().rev() {
            for j in 0..dim {
                let b0 = 2.0 * s * b1[j] - b2[j] + c[j];
                b2[j] = b1[j];
                b1[j] = b0;
            }
        }
        (0..dim).map(|j| s * b1[j] - b2[j] + self.coeffs[0][j]).collect()
    }

    pub fn eval_generic<S: Scalar>(&self, t: &S) -> Vec<S> {
        let s = t.scale(2.0 / (self.b - self.a)).sub(&t.lift((self.a + self.b) / (self.b - self.a)));
        let two_s = s.scale(2.0);
        let n = self.coeffs.len();
        (0..self.dim())
            .map(|j| {
                let mut b1 = t.lift(0.0);
                let mut b2 = t.lift(0.0);
                for k in (1..n).rev() {
                    let b0 = two_s.mul(&b1).sub(&b2).add(&t.lift(self.coeffs[k][j]));
                    b2 = b1;
                    b1 = b0;
                }
                s.mul(&b1).sub(&b2).add(&t.lift(self.coeffs[0][j]))
            })
            .collect()
    }
}

/// `scale * prod_i (t - anchors_i)^power * factor(t)`: vanishes to order
/// `power` at every anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatTerm {
    pub anchors: Vec<f64>,
    pub power: u32,
    pub scale: f64,
    pub factor: ChebSeries,
}

impl FlatTerm {
    pub fn weight_generic<S: Scalar>(&self, t: &S) -> S {
        let mut w = t.lift(self.scale);
        for a in &self.anchors {
            w = w.mul(&t.sub(&t.lift(*a)).powi(self.power));
        }
        w
    }

    pub fn eval_generic<S: Scalar>(&self, t: &S) -> Vec<S> {
        let w = self.weight_generic(t);
        self.factor
            .eval_generic(t)
            .iter()
            .map(|c| c.mul(&w))
            .collect()
    }
}

/// A path `[a, b] -> R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Curve {
    Piecewise(PiecewisePath),
    Newton(NewtonPoly),
    Chebyshev(ChebSeries),
    Flat(FlatTerm),
    /// Pointwise sum of the parts.
    Sum { parts: Vec<Curve> },
    /// `parts[i]` on `[breaks[i], breaks[i+1]]`.
    Concat { breaks: Vec<f64>, parts: Vec<Curve> },
    /// `inner((t - shift) * rate)`.
    Reparam { inner: Box<Curve>, shift: f64, rate: f64 },
    /// `(1 - phi(s)) from + phi(s) to`, `s = (t - a) / (b - a)`, with the
    /// degree-7 smoothstep `phi` (flat to third order at both ends).
    Blend { a: f64, b: f64, from: Box<Curve>, to: Box<Curve> },
    /// Components of the parts, concatenated.
    Stack { parts: Vec<Curve> },
}

/// `35 s^4 - 84 s^5 + 70 s^6 - 20 s^7`.
pub fn smoothstep<S: Scalar>(s: &S) -> S {
    let c = [-20.0, 70.0, -84.0, 35.0];
    let mut acc = s.lift(c[0]);
    for v in &c[1..] {
        acc = acc.mul(s).add(&s.lift(*v));
    }
    acc.mul(&s.powi(4))
}

fn concat_index(breaks: &[f64], t: f64) -> usize {
    let n = breaks.len() - 1;
    let mut i = 0;
    while i + 1 < n && t >= breaks[i + 1] {
        i += 1;
    }
    i
}

impl Curve {
    pub fn dim(&self) -> usize {
        match self {
            Curve::Piecewise(p) => p.pieces[0].dim(),
            Curve::Newton(p) => p.dim(),
            Curve::Chebyshev(p) => p.dim(),
            Curve::Flat(p) => p.factor.dim(),
            Curve::Sum { parts } | Curve::Concat { parts, .. } => parts[0].dim(),
            Curve::Reparam { inner, .. } => inner.dim(),
            Curve::Blend { from, .. } => from.dim(),
            Curve::Stack { parts } => parts.iter().map(Curve::dim).sum(),
        }
    }

    /// A constant path.
    pub fn constant(point: &[f64]) -> Curve {
        Curve::Piecewise(PiecewisePath {
            breaks: vec![0.0, 1.0],
            pieces: vec![LocalPoly {
                center: 0.0,
                coeffs: vec![point.to_vec()],
            }],
        })
    }

    /// Order-`m` Taylor polynomial of the path at `t0`.
    pub fn taylor(&self, t0: f64, m: usize) -> Result<Curve> {
        let j = self.jet(t0, m)?;
        let mut fact = 1.0;
        let coeffs = j
            .derivatives
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                d.iter().map(|v| v / fact).collect()
            })
            .collect();
        Ok(Curve::Piecewise(PiecewisePath {
            breaks: vec![t0, t0 + 1.0],
            pieces: vec![LocalPoly { center: t0, coeffs }],
        }))
    }

    pub fn eval_generic<S: Scalar>(&self, t: &S) -> Vec<S> {
        match self {
            Curve::Piecewise(p) => p.pieces[p.piece_index(t.value())].eval_generic(t),
            Curve::Newton(p) => p.eval_generic(t),
            Curve::Chebyshev(p) => p.eval_generic(t),
            Curve::Flat(p) => p.eval_generic(t),
            Curve::Sum { parts } => {
                let mut acc = parts[0].eval_generic(t);
                for p in &parts[1..] {
                    for (a, b) in acc.iter_mut().zip(p.eval_generic(t)) {
                        *a = a.add(&b);
                    }
                }
                acc
            }
            Curve::Concat { breaks, parts } => parts[concat_index(breaks, t.value())].eval_generic(t),
            Curve::Reparam { inner, shift, rate } => {
                inner.eval_generic(&t.sub(&t.lift(*shift)).scale(*rate))
            }
            Curve::Blend { a, b, from, to } => {
                let s = t.sub(&t.lift(*a)).scale(1.0 / (b - a));
                let phi = smoothstep(&s);
                let one_minus = t.lift(1.0).sub(&phi);
                from.eval_generic(t)
                    .iter()
                    .zip(to.eval_generic(t))
                    .map(|(x, y)| x.mul(&one_minus).add(&y.mul(&phi)))
                    .collect()
            }
            Curve::Stack { parts } => parts.iter().flat_map(|p| p.eval_generic(t)).collect(),
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        match self {
            Curve::Chebyshev(p) => p.eval(t),
            _ => self.eval_generic(&t),
        }
    }

    pub fn jet(&self, t0: f64, m: usize) -> Result<Jet> {
        crate::polycore::jet::check_order(m)?;
        let v = self.eval_generic(&Taylor::variable(t0, m));
        Ok(Jet::from_taylor(t0, m, &v))
    }

    /// Breakpoints where the path may fail to be polynomial.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Curve::Piecewise(p) => p.interior_breaks().to_vec(),
            Curve::Sum { parts } | Curve::Stack { parts } => {
                parts.iter().flat_map(Curve::breakpoints).collect()
            }
            Curve::Concat { breaks, parts } => {
                let mut out: Vec<f64> = breaks[1..breaks.len() - 1].to_vec();
                out.extend(parts.iter().flat_map(Curve::breakpoints));
                out
            }
            Curve::Reparam { inner, shift, rate } => {
                inner.breakpoints().iter().map(|s| shift + s / rate).collect()
            }
            Curve::Blend { from, to, .. } => {
                let mut out = from.breakpoints();
                out.extend(to.breakpoints());
                out
            }
            _ => vec![],
        }
    }

    pub fn is_single_polynomial(&self) -> bool {
        self.breakpoints().is_empty()
    }

    /// Export as a [`MapExpr`] `R -> R^n`; piecewise paths have no such form.
    pub fn to_map(&self) -> Result<MapExpr> {
        match self {
            Curve::Piecewise(p) if p.pieces.len() == 1 => local_map(&p.pieces[0]),
            Curve::Piecewise(_) => Err(Error::Unsupported(
                "piecewise paths have no single map expression".into(),
            )),
            Curve::Newton(p) => newton_map(p),
            Curve::Chebyshev(p) => cheb_map(p),
            Curve::Flat(f) => {
                let mut factors = vec![cheb_map(&f.factor)?];
                for a in &f.anchors {
                    let shift = MapExpr::affine(vec![vec![1.0]], vec![-a])?;
                    factors.push(MapExpr::power(shift, f.power));
                }
                MapExpr::scalar_multiple(f.scale, MapExpr::product(factors)?)
            }
            Curve::Sum { parts } => {
                MapExpr::sum(parts.iter().map(Curve::to_map).collect::<Result<_>>()?)
            }
            Curve::Stack { parts } => {
                MapExpr::stack(parts.iter().map(Curve::to_map).collect::<Result<_>>()?)
            }
            Curve::Reparam { inner, shift, rate } => MapExpr::composition(vec![
                inner.to_map()?,
                MapExpr::affine(vec![vec![*rate]], vec![-shift * rate])?,
            ]),
            Curve::Blend { a, b, from, to } => {
                let s = MapExpr::affine(vec![vec![1.0 / (b - a)]], vec![-a / (b - a)])?;
                let step = MapExpr::composition(vec![
                    MapExpr::polynomial(vec![Polynomial::univariate(&[
                        0.0, 0.0, 0.0, 0.0, 35.0, -84.0, 70.0, -20.0,
                    ])])?,
                    s,
                ])?;
                let one_minus = MapExpr::sum(vec![
                    MapExpr::constant(1, vec![1.0])?,
                    MapExpr::scalar_multiple(-1.0, step.clone())?,
                ])?;
                MapExpr::sum(vec![
                    MapExpr::product(vec![one_minus, from.to_map()?])?,
                    MapExpr::product(vec![step, to.to_map()?])?,
                ])
            }
            Curve::Concat { .. } => Err(Error::Unsupported(
                "concatenated paths have no single map expression".into(),
            )),
        }
    }
}

fn local_map(p: &LocalPoly) -> Result<MapExpr> {
    let n = p.dim();
    // expand sum c_k (t - center)^k into monomials of t
    let shift = Polynomial::univariate(&[-p.center, 1.0]);
    let comps = (0..n)
        .map(|j| {
            let mut acc = Polynomial::zero(1);
            let mut pow = Polynomial::constant(1, 1.0);
            for c in &p.coeffs {
                acc = acc.add_poly(&pow.scale_poly(c[j]));
                pow = pow.mul_poly(&shift);
            }
            acc
        })
        .collect();
    MapExpr::polynomial(comps)
}

/// Unit vector as exponent helpers for the state-space step maps.
fn exps(dim: usize, i: usize, t_power: u32) -> Vec<u32> {
    let mut e = vec![0; dim];
    e[0] = t_power;
    if i > 0 {
        e[i] = 1;
    }
    e
}

/// Horner steps as a flat composition chain on the state `(t, acc)`.
fn newton_map(p: &NewtonPoly) -> Result<MapExpr> {
    let n = p.dim();
    let sd = n + 1;
    let last = p.coeffs.len() - 1;
    let mut lift_m = vec![vec![1.0]];
    lift_m.extend((0..n).map(|_| vec![0.0]));
    let mut lift_b = vec![0.0];
    lift_b.extend(p.coeffs[last].iter().copied());
    let mut chain = vec![MapExpr::affine(lift_m, lift_b)?];
    for k in (0..last).rev() {
        // acc <- c_k + (t - z_k) acc
        let mut comps = vec![Polynomial::variable(sd, 0)];
        for j in 0..n {
            comps.push(Polynomial::new(
                sd,
                [
                    (vec![0; sd], p.coeffs[k][j]),
                    (exps(sd, j + 1, 1), 1.0),
                    (exps(sd, j + 1, 0), -p.nodes[k]),
                ],
            )?);
        }
        chain.push(MapExpr::polynomial(comps)?);
    }
    let proj = (0..n)
        .map(|j| (0..sd).map(|i| if i == j + 1 { 1.0 } else { 0.0 }).collect())
        .collect();
    chain.push(MapExpr::affine(proj, vec![0.0; n])?);
    chain.reverse();
    MapExpr::composition(chain)
}

/// Clenshaw recurrence as a flat composition chain on `(t, b1, b2)`.
fn cheb_map(p: &ChebSeries) -> Result<MapExpr> {
    let n = p.dim();
    let sd = 1 + 2 * n;
    let (sa, sb) = (2.0 / (p.b - p.a), -(p.a + p.b) / (p.b - p.a));
    let deg = p.coeffs.len() - 1;
    let mut lift_m = vec![vec![1.0]];
    lift_m.extend((0..2 * n).map(|_| vec![0.0]));
    let mut chain = vec![MapExpr::affine(lift_m, vec![0.0; sd])?];
    let var = |i: usize| {
        let mut e = vec![0; sd];
        e[i] = 1;
        e
    };
    let t_times = |i: usize| {
        let mut e = vec![0; sd];
        e[0] = 1;
        e[i] = 1;
        e
    };
    for k in (1..=deg).rev() {
        // b0 = 2 s b1 - b2 + c_k, then shift (b1, b2) <- (b0, b1)
        let mut comps = vec![Polynomial::variable(sd, 0)];
        for j in 0..n {
            let (b1, b2) = (1 + j, 1 + n + j);
            comps.push(Polynomial::new(
                sd,
                [
                    (t_times(b1), 2.0 * sa),
                    (var(b1), 2.0 * sb),
                    (var(b2), -1.0),
                    (vec![0; sd], p.coeffs[k][j]),
                ],
            )?);
        }
        for j in 0..n {
            comps.push(Polynomial::variable(sd, 1 + j));
        }
        chain.push(MapExpr::polynomial(comps)?);
    }
    // result = s b1 - b2 + c_0
    let fin = (0..n)
        .map(|j| {
            let (b1, b2) = (1 + j, 1 + n + j);
            Polynomial::new(
                sd,
                [
                    (t_times(b1), sa),
                    (var(b1), sb),
                    (var(b2), -1.0),
                    (vec![0; sd], p.coeffs[0][j]),
                ],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    chain.push(MapExpr::polynomial(fin)?);
    chain.reverse();
    MapExpr::composition(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cheb() -> ChebSeries {
        ChebSeries {
            a: -0.5,
            b: 2.0,
            coeffs: vec![vec![1.0, 0.0], vec![0.5, -1.0], vec![0.25, 2.0], vec![-0.125, 0.5]],
        }
    }

    #[test]
    fn chebyshev_matches_direct_sum() {
        let c = cheb();
        for t in [-0.5, 0.1, 1.3, 2.0] {
            let s: f64 = (2.0 * t - 1.5) / 2.5;
            let tk = [1.0, s, 2.0 * s * s - 1.0, 4.0 * s * s * s - 3.0 * s];
            let direct: Vec<f64> = (0..2)
                .map(|j| (0..4).map(|k| c.coeffs[k][j] * tk[k]).sum())
                .collect();
            let v = c.eval_generic(&t);
            let w = c.eval(t);
            for j in 0..2 {
                assert!((v[j] - direct[j]).abs() < 1e-14);
                assert!((w[j] - direct[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exported_maps_agree_with_native_forms() {
        let curves = vec![
            Curve::Chebyshev(cheb()),
            Curve::Newton(NewtonPoly {
                nodes: vec![0.0, 0.0, 1.0],
                coeffs: vec![vec![1.0], vec![2.0], vec![-1.0]],
            }),
            Curve::Flat(FlatTerm {
                anchors: vec![0.0, 1.0],
                power: 4,
                scale: 3.0,
                factor: cheb(),
            }),
            Curve::Piecewise(
                PiecewisePath::new(
                    vec![0.0, 1.0],
                    vec![LocalPoly::new(0.5, vec![vec![1.0], vec![0.0], vec![2.0]]).unwrap()],
                )
                .unwrap(),
            ),
        ];
        for c in curves {
            let m = c.to_map().unwrap();
            for t in [-0.3, 0.0, 0.4, 1.7] {
                let a = c.eval(t);
                let b = m.eval(&[t]).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()), "{x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn blend_matches_ends_to_third_order() {
        let from = Curve::Chebyshev(cheb());
        let to = Curve::constant(&[3.0, -2.0]);
        let b = Curve::Blend { a: 0.2, b: 0.9, from: Box::new(from.clone()), to: Box::new(to.clone()) };
        let r0 = b.jet(0.2, 3).unwrap().residual(&from.jet(0.2, 3).unwrap());
        let r1 = b.jet(0.9, 3).unwrap().residual(&to.jet(0.9, 3).unwrap());
        assert!(r0 < 1e-12 && r1 < 1e-12, "{r0} {r1}");
        let m = b.to_map().unwrap();
        for t in [0.3, 0.5, 0.8] {
            let (x, y) = (b.eval(t), m.eval(&[t]).unwrap());
            assert!((x[0] - y[0]).abs() < 1e-12 && (x[1] - y[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn reparam_concat_and_stack() {
        let seg = Curve::Piecewise(
            PiecewisePath::new(vec![0.0, 1.0], vec![LocalPoly::segment(0.0, &[0.0], 1.0, &[1.0])]).unwrap(),
        );
        let r = Curve::Reparam { inner: Box::new(seg.clone()), shift: 2.0, rate: 0.5 };
        assert_eq!(r.eval(3.0), vec![0.5]);
        let c = Curve::Concat { breaks: vec![0.0, 1.0, 2.0], parts: vec![seg.clone(), Curve::constant(&[1.0])] };
        assert_eq!(c.eval(1.5), vec![1.0]);
        assert_eq!(c.breakpoints(), vec![1.0]);
        let st = Curve::Stack { parts: vec![seg.clone(), r] };
        assert_eq!(st.eval(2.0), vec![2.0, 0.0]);
        let t = seg.taylor(0.25, 3).unwrap();
        assert_eq!(t.eval(0.75), vec![0.75]);
    }

    #[test]
    fn flat_term_has_vanishing_jets() {
        let f = Curve::Flat(FlatTerm {
            anchors: vec![0.2, 0.7],
            power: 4,
            scale: 1e3,
            factor: cheb(),
        });
        for a in [0.2, 0.7] {
            let j = f.jet(a, 3).unwrap();
            assert!(j.derivatives.iter().flatten().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn piecewise_selects_pieces() {
        let p = PiecewisePath::new(
            vec![0.0, 1.0, 2.0],
            vec![
                LocalPoly::segment(0.0, &[0.0], 1.0, &[1.0]),
                LocalPoly::segment(1.0, &[1.0], 2.0, &[3.0]),
            ],
        )
        .unwrap();
        let c = Curve::Piecewise(p.clone());
        assert_eq!(c.eval(0.5), vec![0.5]);
        assert_eq!(c.eval(1.5), vec![2.0]);
        assert_eq!(p.continuity_gap(), 0.0);
        assert_eq!(c.breakpoints(), vec![1.0]);
        assert!(c.to_map().is_err());
    }
}
