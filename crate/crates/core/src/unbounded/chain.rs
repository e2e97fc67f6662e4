//! The explicit maps that carry a set reaching infinity onto all of `R^d`.
//!
//! Points are written `(x_1, x')` with `x' = (x_2, ..., x_d)`, and
//! `x'' = (x_3, ..., x_d)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Constraint, Relation, SemialgebraicSet};
use crate::polycore::{compose, MapExpr, Polynomial};

fn coordinate(d: usize, i: usize) -> Result<MapExpr> {
    MapExpr::coordinate(d, i)
}

/// `x_1`, guarded so that evaluation fails unless `x_1 > 0`.
fn positive_first(d: usize) -> Result<MapExpr> {
    MapExpr::root(coordinate(d, 0)?, 1)
}

fn need_dim(d: usize, min: usize, what: &str) -> Result<()> {
    if d < min {
        return Err(Error::InvalidInput(format!("{what} needs d >= {min}, got {d}")));
    }
    Ok(())
}

/// `f_l(x_1, x') = (1/x_1, x' / x_1^l)` on `{x_1 > 0}`; an involution.
pub fn f_ell(ell: u32, d: usize) -> Result<MapExpr> {
    need_dim(d, 1, "f_ell")?;
    if ell == 0 {
        return Err(Error::InvalidInput("f_ell needs l >= 1".into()));
    }
    let u = MapExpr::reciprocal(positive_first(d)?);
    let mut parts = vec![u.clone()];
    for j in 1..d {
        parts.push(MapExpr::product(vec![coordinate(d, j)?, MapExpr::power(u.clone(), ell)])?);
    }
    MapExpr::stack(parts)
}

/// `P_1(x_1, x') = (x_1 - (N_1 + N_2 |x'|^2), x')`.
pub fn p1(d: usize, n1: f64, n2: f64) -> Result<MapExpr> {
    need_dim(d, 1, "P1")?;
    let mut first = vec![(unit(d, 0, 1), 1.0), (vec![0; d], -n1)];
    for j in 1..d {
        first.push((unit(d, j, 2), -n2));
    }
    let mut comps = vec![Polynomial::new(d, first)?];
    comps.extend((1..d).map(|j| Polynomial::variable(d, j)));
    MapExpr::polynomial(comps)
}

/// `P_2(x_1, x') = (x_1^2, x')`.
pub fn p2(d: usize) -> Result<MapExpr> {
    need_dim(d, 1, "P2")?;
    let mut comps = vec![Polynomial::new(d, [(unit(d, 0, 2), 1.0)])?];
    comps.extend((1..d).map(|j| Polynomial::variable(d, j)));
    MapExpr::polynomial(comps)
}

/// `P_3(x_1, x_2, x'') = (x_1^2 - x_2^2, 2 x_1 x_2, x'')`.
pub fn p3(d: usize) -> Result<MapExpr> {
    need_dim(d, 2, "P3")?;
    let mut mixed = vec![0; d];
    mixed[0] = 1;
    mixed[1] = 1;
    let mut comps = vec![
        Polynomial::new(d, [(unit(d, 0, 2), 1.0), (unit(d, 1, 2), -1.0)])?,
        Polynomial::new(d, [(mixed, 2.0)])?,
    ];
    comps.extend((2..d).map(|j| Polynomial::variable(d, j)));
    MapExpr::polynomial(comps)
}

fn unit(d: usize, i: usize, e: u32) -> Vec<u32> {
    let mut v = vec![0; d];
    v[i] = e;
    v
}

/// `x -> x / |x|^2` on `R^d \ {0}`.
pub fn inversion(d: usize) -> Result<MapExpr> {
    need_dim(d, 1, "inversion")?;
    MapExpr::product(vec![
        MapExpr::identity(d),
        MapExpr::reciprocal(MapExpr::norm_square(MapExpr::identity(d))),
    ])
}

/// `(x_1, ..., x_d) -> (|x|, x_2, ..., x_d)`, from `R^d \ {0}` to `{x_1 > 0}`.
pub fn norm_flatten(d: usize) -> Result<MapExpr> {
    need_dim(d, 1, "norm_flatten")?;
    let mut parts = vec![MapExpr::euclidean_norm(MapExpr::identity(d))];
    for j in 1..d {
        parts.push(coordinate(d, j)?);
    }
    MapExpr::stack(parts)
}

/// `(x_1, x') -> (x_1^(1/p), x_j - a_j(x_1^(1/p)))` on `{x_1 > 0}`, which
/// sends the curve `t -> (t^p, a_2(t), ..., a_d(t))` to the first axis.
/// Each `a_j` is univariate.
pub fn shear(p: u32, alphas: &[Polynomial]) -> Result<MapExpr> {
    if p == 0 {
        return Err(Error::InvalidInput("shear exponent must be positive".into()));
    }
    if let Some(a) = alphas.iter().find(|a| a.dim() != 1) {
        return Err(Error::dim("shear curve component", 1, a.dim()));
    }
    let d = alphas.len() + 1;
    let s = MapExpr::root(coordinate(d, 0)?, p)?;
    let mut parts = vec![s.clone()];
    for (j, a) in alphas.iter().enumerate() {
        let a_of_s = compose(&MapExpr::polynomial(vec![a.clone()])?, &s)?;
        parts.push(MapExpr::sum(vec![
            coordinate(d, j + 1)?,
            MapExpr::scalar_multiple(-1.0, a_of_s)?,
        ])?);
    }
    MapExpr::stack(parts)
}

/// The data of the chain `P_3 o P_2 o P_1 o f_l o h` with `h` the shear.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceChain {
    pub d: usize,
    pub ell: u32,
    pub n1: f64,
    pub n2: f64,
    /// Exponent of the first curve component `t^p`.
    pub p: u32,
    /// The remaining curve components `a_2, ..., a_d`.
    pub alphas: Vec<Polynomial>,
}

impl HalfspaceChain {
    pub fn new(d: usize, ell: u32, n1: f64, n2: f64, p: u32, alphas: Vec<Polynomial>) -> Result<Self> {
        need_dim(d, 2, "the half-space chain")?;
        if ell == 0 || p == 0 {
            return Err(Error::InvalidInput("l and p must be positive".into()));
        }
        if !(n1 > 0.0 && n2 > 0.0 && n1.is_finite() && n2.is_finite()) {
            return Err(Error::InvalidInput("N1 and N2 must be positive".into()));
        }
        if alphas.len() != d - 1 {
            return Err(Error::dim("curve components", d - 1, alphas.len()));
        }
        if let Some(a) = alphas.iter().find(|a| a.dim() != 1) {
            return Err(Error::dim("curve component", 1, a.dim()));
        }
        Ok(HalfspaceChain { d, ell, n1, n2, p, alphas })
    }

    /// Straight curve `t -> (t, 0, ..., 0)`, so the shear is the identity.
    pub fn straight(d: usize, ell: u32, n1: f64, n2: f64) -> Result<Self> {
        HalfspaceChain::new(d, ell, n1, n2, 1, vec![Polynomial::zero(1); d.saturating_sub(1)])
    }

    pub fn f_ell(&self) -> Result<MapExpr> {
        f_ell(self.ell, self.d)
    }

    pub fn p1(&self) -> Result<MapExpr> {
        p1(self.d, self.n1, self.n2)
    }

    pub fn p2(&self) -> Result<MapExpr> {
        p2(self.d)
    }

    pub fn p3(&self) -> Result<MapExpr> {
        p3(self.d)
    }

    pub fn shear(&self) -> Result<MapExpr> {
        shear(self.p, &self.alphas)
    }

    pub fn inversion(&self) -> Result<MapExpr> {
        inversion(self.d)
    }

    pub fn norm_flatten(&self) -> Result<MapExpr> {
        norm_flatten(self.d)
    }

    /// The curve `t -> (t^p, a_2(t), ..., a_d(t))` the shear straightens.
    pub fn curve(&self, t: f64) -> Vec<f64> {
        let mut x = vec![t.powi(self.p as i32)];
        x.extend(self.alphas.iter().map(|a| a.eval(&[t])));
        x
    }

    /// `P_3 o P_2 o P_1`, polynomial, onto `R^d` from the set `F`.
    pub fn polynomial_part(&self) -> Result<MapExpr> {
        MapExpr::composition(vec![self.p3()?, self.p2()?, self.p1()?])
    }

    /// `P_3 o P_2 o P_1 o f_l o h`.
    pub fn full(&self) -> Result<MapExpr> {
        MapExpr::composition(vec![self.p3()?, self.p2()?, self.p1()?, self.f_ell()?, self.shear()?])
    }

    /// `F = {N_1 + N_2 |x'|^2 <= x_1}`, cut at `x_1 <= x1_max` so it can be
    /// sampled.
    pub fn paraboloid(&self, x1_max: f64) -> Result<SemialgebraicSet> {
        let d = self.d;
        if !(x1_max > self.n1) {
            return Err(Error::InvalidInput(format!("window {x1_max} does not meet F")));
        }
        let inside = p1(d, self.n1, self.n2)?;
        let Some(first) = inside.expand()?.into_iter().next() else {
            return Err(Error::InvalidMap("empty P1".into()));
        };
        let mut down = vec![0.0; d];
        down[0] = -1.0;
        let cap = Polynomial::affine(&down, x1_max);
        let half = ((x1_max - self.n1) / self.n2).sqrt();
        let mut lo = vec![-half; d];
        let mut hi = vec![half; d];
        lo[0] = self.n1;
        hi[0] = x1_max;
        SemialgebraicSet::basic(
            d,
            vec![Constraint::new(first, Relation::Ge), Constraint::new(cap, Relation::Ge)],
            Some((lo, hi)),
        )
    }

    /// Whether `y` satisfies the bound `|y'|^2 <= y_1^(2l-1) / N_2` that
    /// `f_l(F)` obeys.
    pub fn image_bound_margin(&self, y: &[f64]) -> f64 {
        let r2: f64 = y[1..].iter().map(|v| v * v).sum();
        y[0].powi(2 * self.ell as i32 - 1) / self.n2 - r2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::region::stream_rng;
    use rand::Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn f_two_is_an_involution_at_the_worked_point() {
        let f = f_ell(2, 2).unwrap();
        let y = f.eval(&[2.0, 4.0]).unwrap();
        assert!(close(&y, &[0.5, 1.0], 1e-15));
        assert!(close(&f.eval(&y).unwrap(), &[2.0, 4.0], 1e-14));
        assert!(f.eval(&[0.0, 1.0]).is_err());
        assert!(f.eval(&[-1.0, 1.0]).is_err());
    }

    #[test]
    fn f_one_fixes_the_hyperplane_x1_equal_one() {
        let f = f_ell(1, 3).unwrap();
        assert_eq!(f.eval(&[1.0, -2.5, 7.0]).unwrap(), vec![1.0, -2.5, 7.0]);
    }

    #[test]
    fn p3_squares_one_and_i() {
        let p = p3(2).unwrap();
        assert_eq!(p.eval(&[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(p.eval(&[0.0, 1.0]).unwrap(), vec![-1.0, 0.0]);
        assert!(p3(1).is_err());
    }

    #[test]
    fn vertical_coordinates_pass_through() {
        let mut rng = stream_rng(4, 0);
        let (a, b, c) = (p1(4, 1.5, 2.0).unwrap(), p2(4).unwrap(), p3(4).unwrap());
        for _ in 0..100 {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            assert_eq!(a.eval(&x).unwrap()[1..], x[1..]);
            assert_eq!(b.eval(&x).unwrap()[1..], x[1..]);
            assert_eq!(c.eval(&x).unwrap()[2..], x[2..]);
        }
    }

    #[test]
    fn norm_flatten_and_inversion() {
        assert!(close(&norm_flatten(2).unwrap().eval(&[3.0, 4.0]).unwrap(), &[5.0, 4.0], 1e-15));
        assert!(norm_flatten(2).unwrap().eval(&[0.0, 0.0]).is_err());
        let i = inversion(3).unwrap();
        let x = [0.3, -1.2, 2.0];
        assert!(close(&i.eval(&i.eval(&x).unwrap()).unwrap(), &x, 1e-14));
        assert!(i.eval(&[0.0; 3]).is_err());
    }

    #[test]
    fn shear_straightens_its_curve() {
        let alphas = vec![Polynomial::univariate(&[0.0, 0.0, 1.0, -2.0]), Polynomial::univariate(&[0.0, 0.5])];
        let chain = HalfspaceChain::new(3, 3, 1.0, 1.0, 2, alphas).unwrap();
        let h = chain.shear().unwrap();
        for k in 1..=1000 {
            let t = k as f64 / 1000.0;
            let y = h.eval(&chain.curve(t)).unwrap();
            assert!(close(&y, &[t, 0.0, 0.0], 1e-12), "{t} {y:?}");
        }
        assert!(h.eval(&[-1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn paraboloid_window_is_inside_the_set() {
        let chain = HalfspaceChain::straight(2, 3, 1.0, 1.0).unwrap();
        let f = chain.paraboloid(10.0).unwrap();
        assert!(f.margin(&[2.0, 0.9]) > 0.0);
        assert!(f.margin(&[2.0, 1.1]) < 0.0);
        assert!(f.margin(&[10.5, 0.0]) < 0.0);
    }
}
