//! Pearson diffusions `dX = -θ(X - m)dt + √(2θ b(X)) dB` with
//! `b(x) = b2 x² + b1 x + b0`, and their six stationary classes.

mod json;
mod law;

pub use json::{read_params, ParamsSpec};
pub use law::PearsonLaw;

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycalc::Poly;
use crate::rational::{binomial, exact_sqrt, fmt_rational, int, rational_from_f64, to_f64, Rational};

/// Open interval `(lower, upper)`; endpoints may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub const REAL_LINE: Support = Support { lower: f64::NEG_INFINITY, upper: f64::INFINITY };

    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::InvalidParams(format!("empty support ({lower}, {upper})")));
        }
        Ok(Support { lower, upper })
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }

    fn matches(&self, other: &Support) -> bool {
        let close = |a: f64, b: f64| a == b || (a.is_finite() && b.is_finite() && (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0));
        close(self.lower, other.lower) && close(self.upper, other.upper)
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lower, self.upper)
    }
}

/// Number of finite moments of the stationary law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum MomentOrder {
    Finite(usize),
    Infinite,
}

impl MomentOrder {
    pub fn allows(&self, p: usize) -> bool {
        match self {
            MomentOrder::Infinite => true,
            MomentOrder::Finite(q) => p <= *q,
        }
    }
}

impl fmt::Display for MomentOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentOrder::Infinite => f.write_str("inf"),
            MomentOrder::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Parameters of a Pearson diffusion. Coefficients are exact; the support
/// endpoints are roots of `b` (possibly irrational) and kept as floats.
#[derive(Clone, Debug, PartialEq)]
pub struct PearsonParams {
    theta: Rational,
    m: Rational,
    b0: Rational,
    b1: Rational,
    b2: Rational,
    support: Support,
}

impl PearsonParams {
    /// Validates the coefficients and infers the support: the connected
    /// component of `{b > 0}` that contains `m`.
    pub fn new(theta: Rational, m: Rational, b0: Rational, b1: Rational, b2: Rational) -> Result<Self> {
        if !theta.is_positive() {
            return Err(Error::InvalidParams(format!("theta must be positive, got {}", fmt_rational(&theta))));
        }
        let support = infer_support(&m, &b0, &b1, &b2)?;
        Ok(PearsonParams { theta, m, b0, b1, b2, support })
    }

    /// As [`new`](Self::new), but checks a declared support against the
    /// inferred one.
    pub fn with_support(
        theta: Rational,
        m: Rational,
        b0: Rational,
        b1: Rational,
        b2: Rational,
        support: Support,
    ) -> Result<Self> {
        let p = Self::new(theta, m, b0, b1, b2)?;
        if !p.support.matches(&support) {
            return Err(Error::Unclassifiable(format!(
                "b is not positive on {support} with vanishing boundary values; the stationary support is {}",
                p.support
            )));
        }
        Ok(p)
    }

    pub fn with_theta(mut self, theta: Rational) -> Result<Self> {
        if !theta.is_positive() {
            return Err(Error::InvalidParams("theta must be positive".into()));
        }
        self.theta = theta;
        Ok(self)
    }

    pub fn gaussian(mean: Rational, variance: Rational) -> Result<Self> {
        Self::new(Rational::one(), mean, variance, Rational::zero(), Rational::zero())
    }

    /// Gamma with shape `alpha` and rate `beta`: `b(x) = x/β`.
    pub fn gamma(alpha: Rational, beta: Rational) -> Result<Self> {
        if !alpha.is_positive() || !beta.is_positive() {
            return Err(Error::InvalidParams("gamma needs alpha, beta > 0".into()));
        }
        Self::new(Rational::one(), &alpha / &beta, Rational::zero(), beta.recip(), Rational::zero())
    }

    /// Beta on `(0, 1)`: `b(x) = x(1 - x)/(α + β)`.
    pub fn beta(alpha: Rational, beta: Rational) -> Result<Self> {
        if !alpha.is_positive() || !beta.is_positive() {
            return Err(Error::InvalidParams("beta needs alpha, beta > 0".into()));
        }
        let s = (&alpha + &beta).recip();
        Self::new(Rational::one(), &alpha * &s, Rational::zero(), s.clone(), -s)
    }

    /// Student t with `tau` degrees of freedom (`tau > 1`).
    pub fn student_t(tau: Rational) -> Result<Self> {
        if tau <= Rational::one() {
            return Err(Error::InvalidParams("student t needs tau > 1".into()));
        }
        let c = (&tau - Rational::one()).recip();
        Self::new(Rational::one(), Rational::zero(), &tau * &c, Rational::zero(), c)
    }

    /// Skew t (Pearson IV) with density proportional to
    /// `(1 + z²)^(-m) exp(-ν atan z)`, `z = (x - λ)/α`, `m > 1`, `α > 0`.
    pub fn skew_t(m: Rational, nu: Rational, lambda: Rational, alpha: Rational) -> Result<Self> {
        if m <= Rational::one() || !alpha.is_positive() {
            return Err(Error::InvalidParams("skew t needs m > 1 and alpha > 0".into()));
        }
        let c = (int(2) * (&m - Rational::one())).recip();
        let mean = &lambda - &nu * &alpha * &c;
        let b0 = &c * (&lambda * &lambda + &alpha * &alpha);
        let b1 = -int(2) * &lambda * &c;
        Self::new(Rational::one(), mean, b0, b1, c)
    }

    /// Inverse gamma with shape `alpha > 1` and scale `beta`: `b(x) = x²/(α - 1)`.
    pub fn inverse_gamma(alpha: Rational, beta: Rational) -> Result<Self> {
        if alpha <= Rational::one() || !beta.is_positive() {
            return Err(Error::InvalidParams("inverse gamma needs alpha > 1 and beta > 0".into()));
        }
        let c = (&alpha - Rational::one()).recip();
        Self::new(Rational::one(), &beta * &c, Rational::zero(), Rational::zero(), c)
    }

    /// Fisher F with `d1 > 0` and `d2 > 2` degrees of freedom.
    pub fn fisher_f(d1: Rational, d2: Rational) -> Result<Self> {
        if !d1.is_positive() || d2 <= int(2) {
            return Err(Error::InvalidParams("F needs d1 > 0 and d2 > 2".into()));
        }
        let c = (&d2 - int(2)).recip();
        let b2 = int(2) * &c;
        let b1 = int(2) * &d2 * &c / &d1;
        Self::new(Rational::one(), &d2 * &c, Rational::zero(), b1, b2)
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    pub fn m(&self) -> &Rational {
        &self.m
    }

    pub fn b0(&self) -> &Rational {
        &self.b0
    }

    pub fn b1(&self) -> &Rational {
        &self.b1
    }

    pub fn b2(&self) -> &Rational {
        &self.b2
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// `b(x) = b2 x² + b1 x + b0`.
    pub fn b_poly(&self) -> Poly {
        Poly::from_coeffs(vec![self.b0.clone(), self.b1.clone(), self.b2.clone()])
    }

    pub fn b_at(&self, x: f64) -> f64 {
        (to_f64(&self.b2) * x + to_f64(&self.b1)) * x + to_f64(&self.b0)
    }

    pub fn max_moment_order(&self) -> MomentOrder {
        if !self.b2.is_positive() {
            return MomentOrder::Infinite;
        }
        // largest integer p with p < 1 + 1/b2
        let t = Rational::one() + self.b2.recip();
        let p = t.ceil() - Rational::one();
        MomentOrder::Finite(p.to_integer().to_usize().unwrap_or(usize::MAX))
    }

    /// Exact raw moments `m_0..m_pmax` from the three-term recursion.
    pub fn moments(&self, pmax: usize) -> Result<Vec<Rational>> {
        if let MomentOrder::Finite(max) = self.max_moment_order() {
            if pmax > max {
                return Err(Error::MomentDoesNotExist { order: pmax, max });
            }
        }
        let mut out = vec![Rational::one()];
        if pmax >= 1 {
            out.push(self.m.clone());
        }
        for p in 0..pmax.saturating_sub(1) {
            let k = int(p as i64 + 1);
            let den = Rational::one() - &self.b2 * &k;
            if den.is_zero() {
                return Err(Error::DegenerateRecursion { order: p + 2 });
            }
            let next = ((&self.b1 * &k + &self.m) * &out[p + 1] + &k * &self.b0 * &out[p]) / den;
            out.push(next);
        }
        Ok(out)
    }

    /// Stationary variance `b(m)/(1 - b2)`.
    pub fn variance(&self) -> Result<Rational> {
        let mo = self.moments(2)?;
        Ok(&mo[2] - &mo[1] * &mo[1])
    }

    /// Parameters of the law of `γX + δ`; `θ` is unchanged.
    pub fn linear_transform(&self, gamma: &Rational, delta: &Rational) -> Result<Self> {
        if gamma.is_zero() {
            return Err(Error::InvalidParams("linear transform needs gamma != 0".into()));
        }
        let b1 = &self.b1 * gamma - int(2) * &self.b2 * delta;
        let b0 = &self.b0 * gamma * gamma - &self.b1 * gamma * delta + &self.b2 * delta * delta;
        Self::new(self.theta.clone(), &self.m * gamma + delta, b0, b1, self.b2.clone())
    }

    /// Identifies the class and its natural parameters, with `X = loc + scale·Y`
    /// for `Y` the standard member of the class.
    pub fn classify(&self) -> Classification {
        let (b0, b1, b2, m) = (&self.b0, &self.b1, &self.b2, &self.m);
        let f = to_f64;
        if b2.is_zero() {
            if b1.is_zero() {
                return Classification { class: PearsonClass::Gaussian { variance: f(b0) }, loc: f(m), scale: 1.0 };
            }
            let root = -(b0 / b1);
            let alpha = (m - &root) / b1;
            let scale = if b1.is_positive() { 1.0 } else { -1.0 };
            let beta = b1.abs().recip();
            return Classification { class: PearsonClass::Gamma { alpha: f(&alpha), beta: f(&beta) }, loc: f(&root), scale };
        }
        let disc = b1 * b1 - int(4) * b2 * b0;
        if b2.is_negative() {
            let (r1, r2) = roots(b1, b2, &disc);
            let total = -to_f64(&b2.recip());
            let alpha = total * (f(m) - r1) / (r2 - r1);
            return Classification {
                class: PearsonClass::Beta { alpha, beta: total - alpha },
                loc: r1,
                scale: r2 - r1,
            };
        }
        if disc.is_negative() {
            let c = b2;
            let ms = Rational::one() + (int(2) * c).recip();
            let lambda = -(b1 / (int(2) * c));
            let alpha = (f(&(b0 / c - &lambda * &lambda))).sqrt();
            let nu = f(&(&lambda - m)) / (f(c) * alpha);
            return Classification {
                class: PearsonClass::SkewT { m: f(&ms), nu, lambda: f(&lambda), alpha },
                loc: 0.0,
                scale: 1.0,
            };
        }
        if disc.is_zero() {
            let root = -(b1 / (int(2) * b2));
            let alpha = Rational::one() + b2.recip();
            let gap = m - &root;
            let beta = gap.abs() * (&alpha - Rational::one());
            let scale = if gap.is_positive() { 1.0 } else { -1.0 };
            return Classification {
                class: PearsonClass::InverseGamma { alpha: f(&alpha), beta: f(&beta) },
                loc: f(&root),
                scale,
            };
        }
        let (r1, r2) = roots(b1, b2, &disc);
        let d2 = 2.0 + 2.0 / f(b2);
        let mean = f(m);
        let (loc, other, sign) = if mean > r2 { (r2, r1, 1.0) } else { (r1, r2, -1.0) };
        let gamma = (mean - loc).abs() * (d2 - 2.0) / d2;
        let d1 = gamma * d2 / (loc - other).abs();
        Classification { class: PearsonClass::F { d1, d2 }, loc, scale: sign * gamma }
    }

    pub fn law(&self) -> Result<PearsonLaw> {
        PearsonLaw::new(self.clone())
    }

    /// Normalized stationary density; see [`PearsonLaw`] to reuse the
    /// normalizing constant.
    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.law()?.density(x))
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.law()?.cdf(x)
    }

    pub fn sample(&self, seed: u64, n: usize) -> Result<crate::batch::SampleBatch> {
        self.law()?.sample(seed, n)
    }

    /// `[E X, E X², ...]` as floats for `p <= pmax`.
    pub fn moments_f64(&self, pmax: usize) -> Result<Vec<f64>> {
        Ok(self.moments(pmax)?.iter().map(to_f64).collect())
    }
}

impl fmt::Display for PearsonParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "theta={}, m={}, b(x)={}, support={}",
            fmt_rational(&self.theta),
            fmt_rational(&self.m),
            self.b_poly(),
            self.support
        )
    }
}

/// Binomial image of raw moments under `x ↦ γx + δ`.
pub fn transform_moments(moments: &[Rational], gamma: &Rational, delta: &Rational) -> Vec<Rational> {
    (0..moments.len())
        .map(|p| {
            (0..=p).fold(Rational::zero(), |acc, k| {
                acc + binomial(p, k) * num_traits::pow(gamma.clone(), k) * num_traits::pow(delta.clone(), p - k) * &moments[k]
            })
        })
        .collect()
}

fn infer_support(m: &Rational, b0: &Rational, b1: &Rational, b2: &Rational) -> Result<Support> {
    let bm = (b2 * m + b1) * m + b0;
    if !bm.is_positive() {
        return Err(Error::Unclassifiable(format!(
            "b(m) = {} is not positive, so no stationary law has mean m",
            fmt_rational(&bm)
        )));
    }
    let inf = f64::INFINITY;
    if b2.is_zero() {
        if b1.is_zero() {
            return Ok(Support::REAL_LINE);
        }
        let r = to_f64(&-(b0 / b1));
        return Ok(if b1.is_positive() { Support { lower: r, upper: inf } } else { Support { lower: -inf, upper: r } });
    }
    let disc = b1 * b1 - int(4) * b2 * b0;
    if b2.is_negative() {
        let (r1, r2) = roots(b1, b2, &disc);
        return Ok(Support { lower: r1, upper: r2 });
    }
    if disc.is_negative() {
        return Ok(Support::REAL_LINE);
    }
    let mf = to_f64(m);
    if disc.is_zero() {
        let r = -(b1 / (int(2) * b2));
        return Ok(if m > &r { Support { lower: to_f64(&r), upper: inf } } else { Support { lower: -inf, upper: to_f64(&r) } });
    }
    let (r1, r2) = roots(b1, b2, &disc);
    Ok(if mf > r2 { Support { lower: r2, upper: inf } } else { Support { lower: -inf, upper: r1 } })
}

/// Ordered real roots of `b2 x² + b1 x + b0` given a positive discriminant.
fn roots(b1: &Rational, b2: &Rational, disc: &Rational) -> (f64, f64) {
    let (a, b) = if let Some(s) = exact_sqrt(disc) {
        let two_a = int(2) * b2;
        (to_f64(&((-b1 - &s) / &two_a)), to_f64(&((-b1 + &s) / &two_a)))
    } else {
        let s = to_f64(disc).sqrt();
        let b1f = to_f64(b1);
        let q = -0.5 * (b1f + if b1f < 0.0 { -s } else { s });
        let c = to_f64(&(&(b1 * b1 - disc) / (int(4) * b2)));
        (q / to_f64(b2), c / q)
    };
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// The six stationary classes with their natural parameters. Each variant
/// describes a standard member `Y`; see [`Classification`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum PearsonClass {
    /// `N(0, σ²)`.
    Gaussian { variance: f64 },
    /// Shape `alpha`, rate `beta`, on `(0, ∞)`.
    Gamma { alpha: f64, beta: f64 },
    /// On `(0, 1)`.
    Beta { alpha: f64, beta: f64 },
    /// Pearson IV, density `∝ (1 + z²)^(-m) exp(-ν atan z)`, `z = (y - λ)/α`.
    SkewT { m: f64, nu: f64, lambda: f64, alpha: f64 },
    /// Shape `alpha`, scale `beta`, on `(0, ∞)`.
    InverseGamma { alpha: f64, beta: f64 },
    F { d1: f64, d2: f64 },
}

impl PearsonClass {
    pub fn name(&self) -> &'static str {
        match self {
            PearsonClass::Gaussian { .. } => "gaussian",
            PearsonClass::Gamma { .. } => "gamma",
            PearsonClass::Beta { .. } => "beta",
            PearsonClass::SkewT { .. } => "skew_t",
            PearsonClass::InverseGamma { .. } => "inverse_gamma",
            PearsonClass::F { .. } => "f",
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            PearsonClass::Gaussian { variance } => variance > 0.0,
            PearsonClass::Gamma { alpha, beta } | PearsonClass::Beta { alpha, beta } => alpha > 0.0 && beta > 0.0,
            PearsonClass::SkewT { m, alpha, nu, lambda } => m > 1.0 && alpha > 0.0 && nu.is_finite() && lambda.is_finite(),
            PearsonClass::InverseGamma { alpha, beta } => alpha > 1.0 && beta > 0.0,
            PearsonClass::F { d1, d2 } => d1 > 0.0 && d2 > 2.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("{self:?} violates the class constraints")))
        }
    }

    /// Parameters of the standard member (θ = 1).
    pub fn to_params(&self) -> Result<PearsonParams> {
        self.check()?;
        let r = rational_from_f64;
        match *self {
            PearsonClass::Gaussian { variance } => PearsonParams::gaussian(Rational::zero(), r(variance)?),
            PearsonClass::Gamma { alpha, beta } => PearsonParams::gamma(r(alpha)?, r(beta)?),
            PearsonClass::Beta { alpha, beta } => PearsonParams::beta(r(alpha)?, r(beta)?),
            PearsonClass::SkewT { m, nu, lambda, alpha } => PearsonParams::skew_t(r(m)?, r(nu)?, r(lambda)?, r(alpha)?),
            PearsonClass::InverseGamma { alpha, beta } => PearsonParams::inverse_gamma(r(alpha)?, r(beta)?),
            PearsonClass::F { d1, d2 } => PearsonParams::fisher_f(r(d1)?, r(d2)?),
        }
    }
}

/// `X = loc + scale·Y` with `Y` the standard member of `class`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    #[serde(flatten)]
    pub class: PearsonClass,
    #[serde(default)]
    pub loc: f64,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl Classification {
    pub fn to_params(&self, theta: Rational) -> Result<PearsonParams> {
        if self.scale == 0.0 || !self.scale.is_finite() || !self.loc.is_finite() {
            return Err(Error::InvalidParams("classification needs finite loc and nonzero scale".into()));
        }
        self.class
            .to_params()?
            .linear_transform(&rational_from_f64(self.scale)?, &rational_from_f64(self.loc)?)?
            .with_theta(theta)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.class)?;
        if self.loc != 0.0 || self.scale != 1.0 {
            write!(f, " at loc {} scale {}", self.loc, self.scale)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn closed_form_234(p: &PearsonParams) -> [Rational; 3] {
        let (m, b0, b1, b2) = (p.m(), p.b0(), p.b1(), p.b2());
        let one = Rational::one();
        let e = (b1 + m) * m + b0;
        let d1 = &one - b2;
        let d2 = &one - int(2) * b2;
        let d3 = &one - int(3) * b2;
        let m2 = &e / &d1;
        let m3 = (int(2) * b1 + m) * &e / (&d1 * &d2) + int(2) * b0 * m / &d2;
        let m4 = (int(3) * b1 + m) * (int(2) * b1 + m) * &e / (&d1 * &d2 * &d3)
            + (int(3) * b1 + m) * int(2) * b0 * m / (&d2 * &d3)
            + int(3) * b0 * &e / (&d1 * &d3);
        [m2, m3, m4]
    }

    /// The fourth moment with the last term over `1 - 3b2` alone.
    fn uncoupled_fourth(p: &PearsonParams) -> Rational {
        let (m, b0, b1, b2) = (p.m(), p.b0(), p.b1(), p.b2());
        let one = Rational::one();
        let e = (b1 + m) * m + b0;
        let d1 = &one - b2;
        let d2 = &one - int(2) * b2;
        let d3 = &one - int(3) * b2;
        (int(3) * b1 + m) * (int(2) * b1 + m) * &e / (&d1 * &d2 * &d3)
            + (int(3) * b1 + m) * int(2) * b0 * m / (&d2 * &d3)
            + int(3) * b0 * &e / &d3
    }

    fn zoo() -> Vec<PearsonParams> {
        vec![
            PearsonParams::gaussian(rat(1, 3), int(2)).unwrap(),
            PearsonParams::gamma(rat(5, 2), int(3)).unwrap(),
            PearsonParams::beta(int(2), rat(7, 2)).unwrap(),
            PearsonParams::student_t(int(9)).unwrap(),
            PearsonParams::skew_t(int(4), rat(1, 2), int(1), int(2)).unwrap(),
            PearsonParams::inverse_gamma(int(6), int(2)).unwrap(),
            PearsonParams::fisher_f(int(5), int(12)).unwrap(),
        ]
    }

    #[test]
    fn classify_gaussian() {
        let p = PearsonParams::new(int(1), int(0), int(2), int(0), int(0)).unwrap();
        assert_eq!(p.classify().class, PearsonClass::Gaussian { variance: 2.0 });
        assert_eq!(p.support(), Support::REAL_LINE);
    }

    #[test]
    fn classify_gamma() {
        // b(x) = x/β with β = 2, mean 3/2 → α = mβ = 3
        let p = PearsonParams::new(int(1), rat(3, 2), int(0), rat(1, 2), int(0)).unwrap();
        let c = p.classify();
        assert_eq!(c.class, PearsonClass::Gamma { alpha: 3.0, beta: 2.0 });
        assert_eq!((c.loc, c.scale), (0.0, 1.0));
        assert_eq!(p.support(), Support { lower: 0.0, upper: f64::INFINITY });
    }

    #[test]
    fn classify_inverse_gamma() {
        // α = 5: b2 = 1/4, m = 1/2 → β = m(α-1) = 2
        let p = PearsonParams::new(int(1), rat(1, 2), int(0), int(0), rat(1, 4)).unwrap();
        let c = p.classify();
        assert_eq!(c.class, PearsonClass::InverseGamma { alpha: 5.0, beta: 2.0 });
        assert_eq!(c.loc, 0.0);
    }

    #[test]
    fn classify_round_trips() {
        for p in zoo() {
            let c = p.classify();
            let q = c.to_params(p.theta().clone()).unwrap();
            for (a, b) in [(p.m(), q.m()), (p.b0(), q.b0()), (p.b1(), q.b1()), (p.b2(), q.b2())] {
                assert!((to_f64(a) - to_f64(b)).abs() < 1e-9, "{p} vs {q}");
            }
        }
    }

    #[test]
    fn reflected_classes() {
        let g = PearsonParams::gamma(int(2), int(1)).unwrap().linear_transform(&int(-1), &int(4)).unwrap();
        assert_eq!(g.support(), Support { lower: f64::NEG_INFINITY, upper: 4.0 });
        let c = g.classify();
        assert_eq!(c.class, PearsonClass::Gamma { alpha: 2.0, beta: 1.0 });
        assert_eq!((c.loc, c.scale), (4.0, -1.0));
        let f = PearsonParams::fisher_f(int(4), int(10)).unwrap().linear_transform(&rat(-1, 2), &int(1)).unwrap();
        let c = f.classify();
        match c.class {
            PearsonClass::F { d1, d2 } => {
                assert!((d1 - 4.0).abs() < 1e-12 && (d2 - 10.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert!((c.scale + 0.5).abs() < 1e-12 && (c.loc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unclassifiable_inputs() {
        // b(x) = -1 is never positive
        assert!(matches!(PearsonParams::new(int(1), int(0), int(-1), int(0), int(0)), Err(Error::Unclassifiable(_))));
        // beta-type b with mean outside its roots
        assert!(PearsonParams::new(int(1), int(2), int(0), int(1), int(-1)).is_err());
        // declared support that is not the positivity component
        let r = PearsonParams::with_support(int(1), int(1), int(0), int(1), int(0), Support::REAL_LINE);
        assert!(matches!(r, Err(Error::Unclassifiable(_))));
        assert!(PearsonParams::new(int(0), int(0), int(1), int(0), int(0)).is_err());
    }

    #[test]
    fn max_moment_orders() {
        let p = |b2: Rational| PearsonParams::new(int(1), int(0), int(1), int(0), b2).unwrap();
        assert_eq!(p(int(0)).max_moment_order(), MomentOrder::Infinite);
        assert_eq!(p(rat(1, 3)).max_moment_order(), MomentOrder::Finite(3));
        assert_eq!(p(rat(1, 8)).max_moment_order(), MomentOrder::Finite(8));
        assert_eq!(p(rat(-1, 2)).max_moment_order(), MomentOrder::Infinite);
    }

    #[test]
    fn gaussian_moments() {
        let p = PearsonParams::gaussian(int(0), int(1)).unwrap();
        assert_eq!(p.moments(4).unwrap(), vec![int(1), int(0), int(1), int(0), int(3)]);
    }

    #[test]
    fn gamma_second_moment() {
        let (a, b) = (rat(5, 2), int(3));
        let p = PearsonParams::gamma(a.clone(), b.clone()).unwrap();
        assert_eq!(p.moments(2).unwrap()[2], &a * (&a + int(1)) / (&b * &b));
    }

    #[test]
    fn student_variance() {
        for tau in [3i64, 5, 9, 30] {
            let p = PearsonParams::student_t(int(tau)).unwrap();
            assert_eq!(p.moments(2).unwrap()[2], rat(tau, tau - 2));
        }
    }

    #[test]
    fn moment_existence_is_enforced() {
        let p = PearsonParams::student_t(int(4)).unwrap();
        assert_eq!(p.max_moment_order(), MomentOrder::Finite(3));
        assert!(matches!(p.moments(4), Err(Error::MomentDoesNotExist { order: 4, max: 3 })));
        assert_eq!(p.moments(3).unwrap().len(), 4);
    }

    #[test]
    fn recursion_matches_closed_forms() {
        for p in zoo() {
            if p.b2() >= &rat(1, 3) {
                continue;
            }
            let mo = p.moments(4).unwrap();
            assert_eq!(&mo[2..], &closed_form_234(&p)[..], "{p}");
        }
    }

    #[test]
    fn fourth_moment_needs_the_second_moment_denominator() {
        // dropping 1/(1 - b2) from the last term is only harmless when b0·b2 = 0
        for p in zoo() {
            if p.b2() >= &rat(1, 3) {
                continue;
            }
            let exact = p.moments(4).unwrap()[4].clone();
            let agree = uncoupled_fourth(&p) == exact;
            assert_eq!(agree, (p.b0() * p.b2()).is_zero(), "{p}");
        }
        let t9 = PearsonParams::student_t(int(9)).unwrap();
        assert_eq!(t9.moments(4).unwrap()[4], rat(243, 35));
        assert_eq!(uncoupled_fourth(&t9), rat(243, 40));
    }

    #[test]
    fn linear_transform_examples() {
        let g = PearsonParams::gaussian(int(0), int(1)).unwrap();
        assert_eq!(g.linear_transform(&int(1), &int(0)).unwrap(), g);
        let t = g.linear_transform(&int(2), &int(3)).unwrap();
        assert_eq!((t.m(), t.b0(), t.b1(), t.b2()), (&int(3), &int(4), &int(0), &int(0)));
        let mo = t.moments(2).unwrap();
        assert_eq!(&mo[2] - &mo[1] * &mo[1], int(4));
    }

    proptest! {
        #[test]
        fn transform_keeps_b2_and_moments(idx in 0usize..7, gn in 1i64..7, gd in 1i64..5, neg: bool, dn in -6i64..6, dd in 1i64..4) {
            let p = &zoo()[idx];
            let gamma = if neg { -rat(gn, gd) } else { rat(gn, gd) };
            let delta = rat(dn, dd);
            let t = p.linear_transform(&gamma, &delta).unwrap();
            prop_assert_eq!(t.b2(), p.b2());
            prop_assert_eq!(t.m(), &(p.m() * &gamma + &delta));
            let pmax = match p.max_moment_order() { MomentOrder::Finite(q) => q.min(5), MomentOrder::Infinite => 5 };
            let direct = t.moments(pmax).unwrap();
            let binom = transform_moments(&p.moments(pmax).unwrap(), &gamma, &delta);
            prop_assert_eq!(direct, binom);
        }
    }
}
