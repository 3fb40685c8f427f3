use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{write_terms, Poly};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

/// Exponent vector of a monomial.
pub type MultiIndex = Vec<u32>;

/// Sparse multivariate polynomial in `dim` variables `x1..xN` with exact
/// rational coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl MPoly {
    pub fn zero(dim: usize) -> Self {
        MPoly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    /// The coordinate polynomial `x_{i+1}` (0-based `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exps: MultiIndex, c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Embeds a univariate polynomial as a polynomial in coordinate `i`.
    pub fn from_poly(dim: usize, i: usize, p: &Poly) -> Self {
        let mut out = Self::zero(dim);
        for (k, c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0; dim];
            e[i] = k as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant term.
    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.dim])
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Largest exponent of coordinate `i` across all terms.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: MultiIndex, c: Rational) {
        debug_assert_eq!(exps.len(), self.dim);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &MPoly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &MPoly) -> Result<MPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MPoly) -> Result<MPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MPoly) -> Result<MPoly> {
        self.check_dim(other)?;
        let mut out = MPoly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.dim);
        }
        MPoly { dim: self.dim, terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::one(self.dim);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn partial(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * Rational::from_integer(e[i].into()));
        }
        out
    }

    /// Replaces every power `x_i^k` by the univariate polynomial `image(k)` in
    /// the same coordinate. This is how a univariate linear operator acting
    /// on monomials is lifted to coordinate `i`.
    pub fn map_coordinate(&self, i: usize, mut image: impl FnMut(u32) -> Poly) -> MPoly {
        let mut cache: BTreeMap<u32, Poly> = BTreeMap::new();
        let mut out = MPoly::zero(self.dim);
        for (e, c) in &self.terms {
            let img = cache.entry(e[i]).or_insert_with(|| image(e[i]));
            for (k, a) in img.coeffs().iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let mut e2 = e.clone();
                e2[i] = k as u32;
                out.add_term(e2, c * a);
            }
        }
        out
    }

    pub fn eval_exact(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: point.len() });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact evaluation at a float point, rounded once.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        let exact: Option<Vec<Rational>> = point.iter().map(|&x| Rational::from_float(x)).collect();
        match exact {
            Some(p) => Ok(to_f64(&self.eval_exact(&p)?)),
            None => self.to_float().eval(point),
        }
    }

    pub fn to_float(&self) -> FloatMPoly {
        FloatMPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let powers = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect();
                    (to_f64(c), powers)
                })
                .collect(),
        }
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    /// Panics on dimension mismatch; see [`MPoly::checked_add`].
    fn add(self, rhs: &MPoly) -> MPoly {
        self.checked_add(rhs).expect("MPoly dimension mismatch")
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.checked_sub(rhs).expect("MPoly dimension mismatch")
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.checked_mul(rhs).expect("MPoly dimension mismatch")
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly { dim: self.dim, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

/// Ascending total degree; within a degree, `x1` powers first.
impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&MultiIndex> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let terms = keys.into_iter().map(|e| {
            let mono = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                .collect::<Vec<_>>()
                .join("*");
            (self.terms[e].clone(), mono)
        });
        write_terms(f, terms)
    }
}

/// Floating-point snapshot of an [`MPoly`] for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct FloatMPoly {
    dim: usize,
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl FloatMPoly {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: point.len() });
        }
        Ok(self.eval_unchecked(point))
    }

    pub fn eval_unchecked(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, powers)| powers.iter().fold(*c, |acc, &(i, k)| acc * point[i].powi(k as i32)))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn hermite_of_product() {
        let x1x2 = &MPoly::var(2, 0) * &MPoly::var(2, 1);
        let h2 = Poly::from_ints(&[-1, 0, 1]);
        let composed = h2.compose_mpoly(&x1x2);
        let expected = MPoly::from_terms(2, [(vec![2, 2], int(1)), (vec![0, 0], int(-1))]).unwrap();
        assert_eq!(composed, expected);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = MPoly::var(2, 0);
        let b = MPoly::var(3, 0);
        assert!(matches!(a.checked_add(&b), Err(Error::DimensionMismatch { .. })));
        assert!(a.eval(&[1.0]).is_err());
    }

    #[test]
    fn partial_and_map_coordinate() {
        let p = MPoly::from_terms(2, [(vec![3, 1], int(2)), (vec![0, 2], int(1))]).unwrap();
        let dx = p.partial(0);
        assert_eq!(dx, MPoly::monomial(vec![2, 1], int(6)));
        // map x1^k -> k x1^(k-1) reproduces the partial derivative
        let mapped = p.map_coordinate(0, |k| Poly::monomial(int(k as i64), k.saturating_sub(1) as usize));
        assert_eq!(mapped, dx);
    }

    #[test]
    fn evaluation_matches_float_snapshot() {
        let p = MPoly::from_terms(2, [(vec![2, 2], int(1)), (vec![0, 0], int(-1)), (vec![1, 0], int(3))]).unwrap();
        let x = [1.5, -2.0];
        let exact = p.eval(&x).unwrap();
        assert_eq!(exact, 1.5f64.powi(2) * 4.0 - 1.0 + 4.5);
        assert!((p.to_float().eval(&x).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn rendering() {
        let p = MPoly::from_terms(2, [(vec![2, 2], int(1)), (vec![0, 0], int(-1))]).unwrap();
        assert_eq!(p.to_string(), "-1 + x1^2*x2^2");
    }
}
