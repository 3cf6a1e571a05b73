//! Sparse multivariate polynomials with complex coefficients, and Fourier
//! polynomials on the torus.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

// float methods for no_std builds; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ensure_dim, Error, Result};
use crate::C64;

/// Coefficients with magnitude at or below this are dropped.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

/// Sparse polynomial in `nvars` commuting variables.
///
/// Always kept in canonical form: no stored coefficient is at or below the
/// pruning threshold, and every exponent vector has length `nvars`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, C64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars > 0, "polynomials need at least one variable");
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C64::new(1.0, 0.0))
    }

    /// The coordinate function `x^i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, C64::new(1.0, 0.0))
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: C64) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length must equal nvars");
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p.prune(ZERO_THRESHOLD);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, C64)>,
    {
        if nvars == 0 {
            return Err(Error::InvalidInput("polynomials need at least one variable"));
        }
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            ensure_dim(nvars, e.len())?;
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidInput("non-finite polynomial coefficient"));
            }
            p.add_term(e, c);
        }
        p.prune(ZERO_THRESHOLD);
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> C64 {
        self.terms.get(exps).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Coefficient l2 norm.
    pub fn norm(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc + c.norm_sqr()).sqrt()
    }

    pub(crate) fn add_term(&mut self, exps: Exponents, c: C64) {
        *self.terms.entry(exps).or_insert(C64::new(0.0, 0.0)) += c;
    }

    /// Drops every coefficient with magnitude at or below `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    pub fn pruned(mut self, tol: f64) -> Self {
        self.prune(tol);
        self
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut p = Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        };
        p.prune(ZERO_THRESHOLD);
        p
    }

    pub fn derivative(&self, i: usize) -> Self {
        assert!(i < self.nvars, "variable index out of range");
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            p.add_term(d, c * e[i] as f64);
        }
        p.prune(ZERO_THRESHOLD);
        p
    }

    /// Repeated partial derivative `d^{orders[0]}_0 d^{orders[1]}_1 ...`.
    pub fn derivative_multi(&self, orders: &[u32]) -> Self {
        assert_eq!(orders.len(), self.nvars, "derivative order vector length must equal nvars");
        let mut p = Self::zero(self.nvars);
        'terms: for (e, c) in &self.terms {
            let mut d = e.clone();
            let mut factor = 1.0;
            for (k, &o) in orders.iter().enumerate() {
                if d[k] < o {
                    continue 'terms;
                }
                for s in 0..o {
                    factor *= (d[k] - s) as f64;
                }
                d[k] -= o;
            }
            p.add_term(d, c * factor);
        }
        p.prune(ZERO_THRESHOLD);
        p
    }

    /// The homogeneous part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    /// Drops every term of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= max_degree)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    pub fn eval(&self, point: &[C64]) -> C64 {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong dimension");
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(*c, |acc, (&k, &x)| acc * x.powu(k))
            })
            .sum()
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        ensure_dim(self.nvars, rhs.nvars)?;
        Ok(self + rhs)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        ensure_dim(self.nvars, rhs.nvars)?;
        Ok(self - rhs)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        ensure_dim(self.nvars, rhs.nvars)?;
        Ok(self * rhs)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(self.nvars), |acc, _| &acc * self)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "adding polynomials in different variables");
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), *c);
        }
        p.prune(ZERO_THRESHOLD);
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "subtracting polynomials in different variables");
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), -*c);
        }
        p.prune(ZERO_THRESHOLD);
        p
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "multiplying polynomials in different variables");
        let mut p = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        p.prune(ZERO_THRESHOLD);
        p
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Finite Fourier sum `sum f_{l1,l2} y_{l1,l2}` on the torus, with
/// `y_{l1,l2} = exp(i (l1 theta1 + l2 theta2))` and `l1, l2 >= 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TorusFunction {
    terms: BTreeMap<(u32, u32), C64>,
}

impl TorusFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The single mode `c * y_{l1,l2}`.
    pub fn mode(l1: u32, l2: u32, c: C64) -> Self {
        let mut f = Self::zero();
        f.add_term((l1, l2), c);
        f
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), C64)>>(terms: I) -> Self {
        let mut f = Self::zero();
        for (l, c) in terms {
            f.add_term(l, c);
        }
        f
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, l1: u32, l2: u32) -> C64 {
        self.terms.get(&(l1, l2)).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc + c.norm_sqr()).sqrt()
    }

    fn add_term(&mut self, l: (u32, u32), c: C64) {
        let slot = self.terms.entry(l).or_insert(C64::new(0.0, 0.0));
        *slot += c;
        if slot.norm() <= ZERO_THRESHOLD {
            self.terms.remove(&l);
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_terms(self.terms.iter().map(|(l, v)| (*l, v * c)))
    }
}

impl Add for &TorusFunction {
    type Output = TorusFunction;
    fn add(self, rhs: &TorusFunction) -> TorusFunction {
        let mut f = self.clone();
        for (l, c) in &rhs.terms {
            f.add_term(*l, *c);
        }
        f
    }
}

impl Sub for &TorusFunction {
    type Output = TorusFunction;
    fn sub(self, rhs: &TorusFunction) -> TorusFunction {
        let mut f = self.clone();
        for (l, c) in &rhs.terms {
            f.add_term(*l, -*c);
        }
        f
    }
}

impl Mul for &TorusFunction {
    type Output = TorusFunction;
    /// Pointwise product, `y_l y_m = y_{l+m}`.
    fn mul(self, rhs: &TorusFunction) -> TorusFunction {
        let mut f = TorusFunction::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                f.add_term((a.0 + b.0, a.1 + b.1), ca * cb);
            }
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn arithmetic_cancels_to_canonical_zero() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let p = &(&x * &y) - &(&y * &x);
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn derivative_of_power() {
        let x = Polynomial::var(2, 0);
        let p = x.pow(3).scale(r(2.0));
        let d = p.derivative(0);
        assert_eq!(d.coeff(&[2, 0]), r(6.0));
        assert!(p.derivative(1).is_zero());
        let dd = p.derivative_multi(&[2, 0]);
        assert_eq!(dd.coeff(&[1, 0]), r(12.0));
    }

    #[test]
    fn tiny_coefficients_are_pruned() {
        let p = Polynomial::from_terms(2, [(vec![1, 0], r(1e-13)), (vec![0, 1], r(1.0))]).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn mismatched_exponent_length_is_rejected() {
        let err = Polynomial::from_terms(3, [(vec![1, 0], r(1.0))]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, found: 2 });
        assert!(Polynomial::var(2, 0).checked_mul(&Polynomial::var(3, 0)).is_err());
    }

    #[test]
    fn torus_product_adds_indices() {
        let f = TorusFunction::mode(1, 0, r(2.0));
        let g = TorusFunction::mode(0, 3, C64::new(0.0, 1.0));
        let h = &f * &g;
        assert_eq!(h.coeff(1, 3), C64::new(0.0, 2.0));
    }
}
