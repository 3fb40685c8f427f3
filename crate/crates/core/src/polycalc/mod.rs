//! Exact polynomial arithmetic.
//!
//! [`Poly`] is univariate, [`MPoly`] is sparse multivariate; both carry
//! `BigRational` coefficients so that generator identities can be checked
//! with `==` instead of a tolerance. [`SurdPoly`] adds a single formal
//! `√s` factor, used when a chaos element is rescaled by an irrational
//! constant.

mod mpoly;
mod poly;

pub use mpoly::{FloatMPoly, MPoly, MultiIndex};
pub use poly::Poly;

use num_traits::Zero;

use crate::error::Result;
use crate::rational::{exact_sqrt, Rational, Surd};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Binary arithmetic on univariate polynomials.
pub fn poly_arith(p: &Poly, q: &Poly, op: ArithOp) -> Poly {
    match op {
        ArithOp::Add => p + q,
        ArithOp::Sub => p - q,
        ArithOp::Mul => p * q,
    }
}

/// Binary arithmetic on multivariate polynomials; fails on dimension mismatch.
pub fn mpoly_arith(p: &MPoly, q: &MPoly, op: ArithOp) -> Result<MPoly> {
    match op {
        ArithOp::Add => p.checked_add(q),
        ArithOp::Sub => p.checked_sub(q),
        ArithOp::Mul => p.checked_mul(q),
    }
}

/// A polynomial `even + √radicand · odd` with rational-coefficient parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdPoly {
    even: MPoly,
    odd: MPoly,
    radicand: Rational,
}

impl SurdPoly {
    pub fn new(even: MPoly, odd: MPoly, radicand: Rational) -> Self {
        assert_eq!(even.dim(), odd.dim());
        if let Some(root) = exact_sqrt(&radicand) {
            let folded = &even + &odd.scale(&root);
            let dim = folded.dim();
            return SurdPoly { even: folded, odd: MPoly::zero(dim), radicand: Rational::zero() };
        }
        SurdPoly { even, odd, radicand }
    }

    pub fn from_mpoly(p: MPoly) -> Self {
        let dim = p.dim();
        SurdPoly { even: p, odd: MPoly::zero(dim), radicand: Rational::zero() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::from_mpoly(MPoly::constant(dim, c))
    }

    pub fn dim(&self) -> usize {
        self.even.dim()
    }

    pub fn even(&self) -> &MPoly {
        &self.even
    }

    pub fn odd(&self) -> &MPoly {
        &self.odd
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }

    fn common(&self, other: &SurdPoly) -> Rational {
        match (self.odd.is_zero(), other.odd.is_zero()) {
            (true, _) => other.radicand.clone(),
            (_, true) => self.radicand.clone(),
            _ => {
                assert_eq!(self.radicand, other.radicand, "surd polynomials over different radicands");
                self.radicand.clone()
            }
        }
    }

    pub fn add(&self, other: &SurdPoly) -> SurdPoly {
        let s = self.common(other);
        SurdPoly::new(&self.even + &other.even, &self.odd + &other.odd, s)
    }

    pub fn sub(&self, other: &SurdPoly) -> SurdPoly {
        let s = self.common(other);
        SurdPoly::new(&self.even - &other.even, &self.odd - &other.odd, s)
    }

    pub fn mul(&self, other: &SurdPoly) -> SurdPoly {
        let s = self.common(other);
        let mut even = &self.even * &other.even;
        if !self.odd.is_zero() && !other.odd.is_zero() {
            even = &even + &(&self.odd * &other.odd).scale(&s);
        }
        let odd = &(&self.even * &other.odd) + &(&self.odd * &other.even);
        SurdPoly::new(even, odd, s)
    }

    pub fn scale(&self, c: &Rational) -> SurdPoly {
        SurdPoly { even: self.even.scale(c), odd: self.odd.scale(c), radicand: self.radicand.clone() }
    }

    /// Applies a linear map to both parts.
    pub fn map_linear(&self, f: impl Fn(&MPoly) -> Result<MPoly>) -> Result<SurdPoly> {
        Ok(SurdPoly::new(f(&self.even)?, f(&self.odd)?, self.radicand.clone()))
    }

    /// Integrates with a linear functional on rational polynomials.
    pub fn integrate_with(&self, f: impl Fn(&MPoly) -> Result<Rational>) -> Result<Surd> {
        let a = f(&self.even)?;
        let b = if self.odd.is_zero() { Rational::zero() } else { f(&self.odd)? };
        Ok(Surd::new(a, b, self.radicand.clone()))
    }

    /// `outer ∘ self` by Horner's scheme.
    pub fn compose_into(outer: &Poly, inner: &SurdPoly) -> SurdPoly {
        let dim = inner.dim();
        outer.coeffs().iter().rev().fold(SurdPoly::from_mpoly(MPoly::zero(dim)), |acc, c| {
            acc.mul(inner).add(&SurdPoly::constant(dim, c.clone()))
        })
    }
}

impl std::fmt::Display for SurdPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.odd.is_zero() {
            write!(f, "{}", self.even)
        } else {
            write!(f, "({}) + sqrt({})*({})", self.even, crate::rational::fmt_rational(&self.radicand), self.odd)
        }
    }
}
