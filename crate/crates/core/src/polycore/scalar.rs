//! Scalar arithmetic shared by plain evaluation, truncated Taylor jets and
//! symbolic expansion.

use crate::error::{Error, Result};

/// Arguments closer to zero than this are treated as poles.
pub const POLE_TOL: f64 = 1e-14;

/// Highest derivative order carried by [`Taylor`].
pub const MAX_ORDER: usize = 8;

/// Ring-like scalar used by the generic evaluators.
pub trait Scalar: Clone + Send + Sync {
    /// A constant of the same shape as `self` (same truncation order, same
    /// number of variables).
    fn lift(&self, c: f64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn recip(&self) -> Result<Self>;
    /// Principal `p`-th root; the argument must be positive.
    fn root(&self, p: u32) -> Result<Self>;
    /// Leading (constant) value, used for pole tests and piece selection.
    fn value(&self) -> f64;

    fn powi(&self, e: u32) -> Self {
        let mut result = self.lift(1.0);
        let mut base = self.clone();
        let mut e = e;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { result.mul(&base) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

impl Scalar for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn recip(&self) -> Result<Self> {
        if self.abs() <= POLE_TOL || !self.is_finite() {
            return Err(Error::Pole {
                node: "reciprocal",
                value: *self,
            });
        }
        Ok(1.0 / self)
    }
    fn root(&self, p: u32) -> Result<Self> {
        if *self <= POLE_TOL || !self.is_finite() {
            return Err(Error::Pole {
                node: "root",
                value: *self,
            });
        }
        Ok(match p {
            1 => *self,
            2 => self.sqrt(),
            3 => self.cbrt(),
            _ => self.powf(1.0 / p as f64),
        })
    }
    fn value(&self) -> f64 {
        *self
    }
}

/// Truncated univariate Taylor series `sum c[k] (t - t0)^k`, `k <= order`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor {
    order: usize,
    c: [f64; MAX_ORDER + 1],
}

impl Taylor {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = [0.0; MAX_ORDER + 1];
        c[0] = value;
        Taylor {
            order: order.min(MAX_ORDER),
            c,
        }
    }

    /// The independent variable `t` expanded at `t0`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut s = Taylor::constant(t0, order);
        if s.order >= 1 {
            s.c[1] = 1.0;
        }
        s
    }

    pub fn from_coeffs(coeffs: &[f64], order: usize) -> Self {
        let mut s = Taylor::constant(0.0, order);
        for (k, v) in coeffs.iter().enumerate().take(s.order + 1) {
            s.c[k] = *v;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> f64 {
        if k <= self.order {
            self.c[k]
        } else {
            0.0
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..=self.order]
    }

    /// `k`-th derivative at the expansion point, `k! c_k`.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut f = 1.0;
        for j in 2..=k {
            f *= j as f64;
        }
        f * self.coeff(k)
    }

    fn same_order(&self, other: &Self) -> usize {
        self.order.min(other.order)
    }

    /// `self^alpha` for real `alpha`, requires a positive constant term.
    fn real_power(&self, alpha: f64, a0_pow: f64) -> Self {
        let n = self.order;
        let a = &self.c;
        let mut y = Taylor::constant(a0_pow, n);
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += (alpha * j as f64 - (k - j) as f64) * a[j] * y.c[k - j];
            }
            y.c[k] = s / (k as f64 * a[0]);
        }
        y
    }
}

impl Scalar for Taylor {
    fn lift(&self, c: f64) -> Self {
        Taylor::constant(c, self.order)
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.same_order(other);
        let mut r = Taylor::constant(0.0, n);
        for k in 0..=n {
            r.c[k] = self.c[k] + other.c[k];
        }
        r
    }
    fn sub(&self, other: &Self) -> Self {
        let n = self.same_order(other);
        let mut r = Taylor::constant(0.0, n);
        for k in 0..=n {
            r.c[k] = self.c[k] - other.c[k];
        }
        r
    }
    fn mul(&self, other: &Self) -> Self {
        let n = self.same_order(other);
        let mut r = Taylor::constant(0.0, n);
        for k in 0..=n {
            let mut s = 0.0;
            for j in 0..=k {
                s += self.c[j] * other.c[k - j];
            }
            r.c[k] = s;
        }
        r
    }
    fn scale(&self, c: f64) -> Self {
        let mut r = *self;
        for k in 0..=self.order {
            r.c[k] *= c;
        }
        r
    }
    fn recip(&self) -> Result<Self> {
        let a0 = self.c[0];
        if a0.abs() <= POLE_TOL || !a0.is_finite() {
            return Err(Error::Pole {
                node: "reciprocal",
                value: a0,
            });
        }
        let n = self.order;
        let mut b = Taylor::constant(1.0 / a0, n);
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.c[j] * b.c[k - j];
            }
            b.c[k] = -s / a0;
        }
        Ok(b)
    }
    fn root(&self, p: u32) -> Result<Self> {
        let a0 = self.c[0];
        let r0 = a0.root(p)?;
        Ok(self.real_power(1.0 / p as f64, r0))
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn taylor_product_and_reciprocal() {
        // 1/(1-t) = 1 + t + t^2 + ...
        let t = Taylor::variable(0.0, 5);
        let one_minus = t.lift(1.0).sub(&t);
        let r = one_minus.recip().unwrap();
        for k in 0..=5 {
            assert_relative_eq!(r.coeff(k), 1.0, epsilon = 1e-15);
        }
        let sq = t.add(&t.lift(2.0)).powi(2);
        assert_eq!(sq.coeffs()[..3], [4.0, 4.0, 1.0]);
    }

    #[test]
    fn taylor_root_matches_binomial_series() {
        // sqrt(1+t) = 1 + t/2 - t^2/8 + t^3/16
        let t = Taylor::variable(0.0, 3);
        let s = t.lift(1.0).add(&t).root(2).unwrap();
        assert_relative_eq!(s.coeff(1), 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.coeff(2), -0.125, epsilon = 1e-15);
        assert_relative_eq!(s.coeff(3), 0.0625, epsilon = 1e-15);
        // cube root of 8 + 12 t + 6 t^2 + t^3 = 2 + t
        let c = Taylor::from_coeffs(&[8.0, 12.0, 6.0, 1.0], 4).root(3).unwrap();
        assert_relative_eq!(c.coeff(0), 2.0, epsilon = 1e-15);
        assert_relative_eq!(c.coeff(1), 1.0, epsilon = 1e-14);
        assert!(c.coeff(2).abs() < 1e-14 && c.coeff(4).abs() < 1e-14);
    }

    #[test]
    fn poles_are_reported() {
        assert!(matches!(Scalar::recip(&0.0f64), Err(Error::Pole { .. })));
        assert!(matches!(Scalar::root(&-1.0f64, 2), Err(Error::Pole { .. })));
        assert!(Taylor::variable(0.0, 2).recip().is_err());
    }

    #[test]
    fn derivative_uses_factorials() {
        let t = Taylor::variable(2.0, 4);
        let cube = t.powi(3);
        assert_relative_eq!(cube.derivative(0), 8.0);
        assert_relative_eq!(cube.derivative(1), 12.0);
        assert_relative_eq!(cube.derivative(2), 12.0);
        assert_relative_eq!(cube.derivative(3), 6.0);
        assert_eq!(cube.derivative(4), 0.0);
    }
}
