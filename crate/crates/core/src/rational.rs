//! Exact rational numbers and quadratic surds.
//!
//! All symbolic identities in the crate are checked over `BigRational`.
//! [`Surd`] extends this to `a + b·√s` for a fixed rational radicand `s`,
//! which is what appears once a chaos element is rescaled to a prescribed
//! variance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders `p/q`, or `p` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"`, an integer, or a decimal literal such as `"-0.25"` or
/// `"1e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// Converts a finite float through its shortest round-trip decimal form, so
/// `0.1` becomes `1/10` rather than the binary expansion.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite value {x}")));
    }
    parse_decimal(&format!("{x:e}"))
}

/// Exact square root of a non-negative rational, when it exists.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn binomial(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

pub fn factorial(n: usize) -> Rational {
    Rational::from_integer((1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
}

/// Serde adapter: rationals as `"p/q"` strings; numbers and decimal strings
/// are accepted on input.
pub mod serde_rational {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_value(&v).map_err(de::Error::custom)
    }

    pub(crate) fn from_value(v: &serde_json::Value) -> Result<Rational> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(int(i))
                } else {
                    rational_from_f64(n.as_f64().unwrap_or(f64::NAN))
                }
            }
            other => Err(Error::Parse(format!("expected rational, got {other}"))),
        }
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(fmt_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(serde_rational::from_value)
            .collect::<Result<_>>()
            .map_err(de::Error::custom)
    }
}

/// An element `rational + irrational·√radicand` of a real quadratic field.
///
/// Values with a zero irrational part are plain rationals and combine with
/// any radicand. Radicands that are perfect squares are folded away on
/// construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    rational: Rational,
    irrational: Rational,
    radicand: Rational,
}

impl Surd {
    pub fn new(rational: Rational, irrational: Rational, radicand: Rational) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        if irrational.is_zero() || radicand.is_zero() {
            return Self::from_rational(rational);
        }
        if let Some(root) = exact_sqrt(&radicand) {
            return Self::from_rational(rational + irrational * root);
        }
        Surd { rational, irrational, radicand }
    }

    pub fn from_rational(r: Rational) -> Self {
        Surd { rational: r, irrational: Rational::zero(), radicand: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    /// `√s` itself.
    pub fn sqrt_of(s: &Rational) -> Self {
        Self::new(Rational::zero(), Rational::one(), s.clone())
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn irrational_part(&self) -> &Rational {
        &self.irrational
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.irrational.is_zero().then_some(&self.rational)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.irrational.is_zero()
    }

    fn common_radicand(&self, other: &Surd) -> Rational {
        match (self.irrational.is_zero(), other.irrational.is_zero()) {
            (true, _) => other.radicand.clone(),
            (_, true) => self.radicand.clone(),
            _ => {
                assert_eq!(self.radicand, other.radicand, "surds over different radicands");
                self.radicand.clone()
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Surd {
        Surd::new(&self.rational * c, &self.irrational * c, self.radicand.clone())
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.rational);
        let sb = sign(&self.irrational);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with b²·s
        let a2 = &self.rational * &self.rational;
        let b2s = &self.irrational * &self.irrational * &self.radicand;
        match a2.cmp(&b2s) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.rational) + to_f64(&self.irrational) * to_f64(&self.radicand).sqrt()
    }
}

fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl From<Rational> for Surd {
    fn from(r: Rational) -> Self {
        Surd::from_rational(r)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self - other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let s = self.common_radicand(rhs);
        Surd::new(&self.rational + &rhs.rational, &self.irrational + &rhs.irrational, s)
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        let s = self.common_radicand(rhs);
        Surd::new(&self.rational - &rhs.rational, &self.irrational - &rhs.irrational, s)
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let s = self.common_radicand(rhs);
        let a = &self.rational * &rhs.rational + &self.irrational * &rhs.irrational * &s;
        let b = &self.rational * &rhs.irrational + &self.irrational * &rhs.rational;
        Surd::new(a, b, s)
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd::new(-&self.rational, -&self.irrational, self.radicand.clone())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irrational.is_zero() {
            return f.write_str(&fmt_rational(&self.rational));
        }
        if !self.rational.is_zero() {
            write!(f, "{} ", fmt_rational(&self.rational))?;
            f.write_str(if self.irrational.is_negative() { "- " } else { "+ " })?;
            write!(f, "{}*sqrt({})", fmt_rational(&self.irrational.abs()), fmt_rational(&self.radicand))
        } else {
            write!(f, "{}*sqrt({})", fmt_rational(&self.irrational), fmt_rational(&self.radicand))
        }
    }
}

impl serde::Serialize for Surd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
