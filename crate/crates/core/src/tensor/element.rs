use num_traits::{One, Signed, Zero};

use super::homogeneous::HomogeneousSum;
use super::TensorGenerator;
use crate::error::{Error, Result};
use crate::generator::admits_degree;
use crate::polycalc::{MPoly, MultiIndex, SurdPoly};
use crate::rational::{binomial, fmt_rational, Rational, Surd};
use crate::spectral::chaos_grade;

/// Unscaled shape of a chaos element.
#[derive(Clone, Debug, PartialEq)]
pub enum ChaosBody {
    Polynomial(MPoly),
    /// Kept symbolic so that sums over thousands of coordinates stay cheap.
    Homogeneous(HomogeneousSum),
}

/// `F = √scale_sq · body`, an eigenfunction of `L_N` with eigenvalue `-λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChaosElement {
    gen: TensorGenerator,
    body: ChaosBody,
    scale_sq: Rational,
    lambda: Rational,
    grade: Rational,
    label: String,
}

impl ChaosElement {
    pub(crate) fn from_parts(
        gen: TensorGenerator,
        body: ChaosBody,
        lambda: Rational,
        grade: Rational,
        label: String,
    ) -> Self {
        ChaosElement { gen, body, scale_sq: Rational::one(), lambda, grade, label }
    }

    /// Builds an element from a polynomial that must lie in one eigenspace.
    pub fn from_poly(gen: &TensorGenerator, f: MPoly) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::InvalidInput("the zero polynomial is not an eigenfunction".into()));
        }
        let e = gen.to_eigen_coords(&f)?;
        let mut lambda: Option<Rational> = None;
        for (alpha, _) in e.terms() {
            let l = gen.lambda_of(alpha);
            match &lambda {
                None => lambda = Some(l),
                Some(l0) if *l0 != l => {
                    return Err(Error::MixedEigenvalues(format!(
                        "components with eigenvalues -{} and -{}",
                        fmt_rational(l0),
                        fmt_rational(&l)
                    )))
                }
                _ => {}
            }
        }
        let lambda = lambda.unwrap_or_else(Rational::zero);
        if lambda.is_zero() {
            return Err(Error::InvalidInput("constants are not centered eigenfunctions".into()));
        }
        let grade = tensor_chaos_grade(gen, &f)? / &lambda;
        let label = format!("{f}");
        Ok(ChaosElement::from_parts(gen.clone(), ChaosBody::Polynomial(f), lambda, grade, label))
    }

    pub fn generator(&self) -> &TensorGenerator {
        &self.gen
    }

    pub fn body(&self) -> &ChaosBody {
        &self.body
    }

    pub fn dim(&self) -> usize {
        self.gen.dim()
    }

    pub fn scale_sq(&self) -> &Rational {
        &self.scale_sq
    }

    /// `λ > 0`, so that `L_N F = -λ F`.
    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn eigenvalue(&self) -> Rational {
        -self.lambda.clone()
    }

    pub fn grade(&self) -> &Rational {
        &self.grade
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Multiplies `F` by `√s`.
    pub fn scaled_by_sqrt(mut self, s: &Rational) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::InvalidInput("scale must be positive".into()));
        }
        self.scale_sq = &self.scale_sq * s;
        Ok(self)
    }

    /// Rescaled to unit variance.
    pub fn normalized(self) -> Result<Self> {
        let v = self.variance()?;
        self.scaled_by_sqrt(&v.recip())
    }

    /// Same element viewed under `factor·L_N`: `λ` scales, the grade does not.
    pub fn rescaled(&self, factor: &Rational) -> Result<Self> {
        let gen = self.gen.rescaled(factor)?;
        let body = match &self.body {
            ChaosBody::Polynomial(p) => ChaosBody::Polynomial(p.clone()),
            ChaosBody::Homogeneous(h) => ChaosBody::Homogeneous(h.rescaled(factor)?),
        };
        Ok(ChaosElement {
            gen,
            body,
            scale_sq: self.scale_sq.clone(),
            lambda: &self.lambda * factor,
            grade: self.grade.clone(),
            label: self.label.clone(),
        })
    }

    /// The unscaled body as a polynomial, if it is small enough to expand.
    pub fn body_poly(&self) -> Result<MPoly> {
        match &self.body {
            ChaosBody::Polynomial(p) => Ok(p.clone()),
            ChaosBody::Homogeneous(h) => h.materialize(),
        }
    }

    pub fn is_materializable(&self) -> bool {
        match &self.body {
            ChaosBody::Polynomial(_) => true,
            ChaosBody::Homogeneous(h) => h.is_materializable(),
        }
    }

    /// `F` itself.
    pub fn materialize(&self) -> Result<SurdPoly> {
        let body = self.body_poly()?;
        let dim = body.dim();
        Ok(SurdPoly::new(MPoly::zero(dim), body, self.scale_sq.clone()))
    }

    /// `E[body^r]` for `r = 0..=rmax`.
    pub fn body_moments(&self, rmax: usize) -> Result<Vec<Rational>> {
        match &self.body {
            ChaosBody::Homogeneous(h) => h.raw_moments(rmax),
            ChaosBody::Polynomial(p) => {
                let mut out = vec![Rational::one()];
                let mut half: Option<MPoly> = None;
                for r in 1..=rmax {
                    let v = match r {
                        1 => Rational::zero(),
                        2 => self.gen.integrate_product(p, p)?,
                        _ if r % 2 == 0 => {
                            let h = p.pow(r as u32 / 2);
                            let v = self.gen.integrate_product(&h, &h)?;
                            half = Some(h);
                            v
                        }
                        _ => {
                            let h = half.take().unwrap_or_else(|| p.pow(r as u32 / 2));
                            self.gen.integrate_product(&(&h * p), &h)?
                        }
                    };
                    out.push(v);
                }
                Ok(out)
            }
        }
    }

    /// `E[F^r]` for `r = 0..=rmax`.
    pub fn moments(&self, rmax: usize) -> Result<Vec<Surd>> {
        let raw = self.body_moments(rmax)?;
        let root = Surd::sqrt_of(&self.scale_sq);
        let mut pow = Surd::from_rational(Rational::one());
        let mut out = Vec::with_capacity(raw.len());
        for (r, m) in raw.iter().enumerate() {
            if r > 0 {
                pow = &pow * &root;
            }
            out.push(pow.scale(m));
        }
        Ok(out)
    }

    /// `E[(F + m)^r]` for `r = 0..=rmax`.
    pub fn shifted_moments(&self, m: &Rational, rmax: usize) -> Result<Vec<Surd>> {
        let f = self.moments(rmax)?;
        Ok((0..=rmax)
            .map(|r| {
                (0..=r).fold(Surd::zero(), |acc, j| {
                    let c = binomial(r, j) * pow_int(m, r - j);
                    &acc + &f[j].scale(&c)
                })
            })
            .collect())
    }

    pub fn variance(&self) -> Result<Rational> {
        let raw = self.body_moments(2)?;
        Ok(&self.scale_sq * &raw[2])
    }
}

fn pow_int(x: &Rational, k: usize) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * x)
}

/// `F = Σ a_α P_α`; every `α` must carry the same eigenvalue.
pub fn tensor_eigenfunction(gen: &TensorGenerator, terms: &[(MultiIndex, Rational)]) -> Result<ChaosElement> {
    let mut lambda: Option<Rational> = None;
    for (alpha, _) in terms {
        if alpha.len() != gen.dim() {
            return Err(Error::DimensionMismatch { expected: gen.dim(), found: alpha.len() });
        }
        let l = gen.lambda_of(alpha);
        if let Some(l0) = &lambda {
            if *l0 != l {
                return Err(Error::MixedEigenvalues(format!(
                    "{alpha:?} has eigenvalue -{} but earlier terms have -{}",
                    fmt_rational(&l),
                    fmt_rational(l0)
                )));
            }
        }
        lambda = Some(l);
    }
    let mut f = MPoly::zero(gen.dim());
    for (alpha, a) in terms {
        f = &f + &gen.eigenfunction(alpha)?.scale(a);
    }
    ChaosElement::from_poly(gen, f)
}

/// `η·λ` for `f`: the largest eigenvalue in the expansion of `f²`. Divide by
/// `λ` for the grade. Each coordinate's degree `n` must be chaotic.
pub fn tensor_chaos_grade(gen: &TensorGenerator, f: &MPoly) -> Result<Rational> {
    for (i, g) in gen.coords().iter().enumerate() {
        let n = f.degree_in(i) as usize;
        if n > 0 && !admits_degree(g.params().b2(), 2 * n) {
            return Err(Error::NotChaotic(format!("coordinate {} at degree {n}", i + 1)));
        }
    }
    let sq = f.checked_mul(f)?;
    gen.top_eigenvalue(&sq)
}

/// `Σ λ_{α_i} η_{α_i} / Σ λ_{α_i}`, the grade of the single product `P_α`.
pub fn weighted_grade(gen: &TensorGenerator, alpha: &[u32]) -> Result<Rational> {
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for (g, &a) in gen.coords().iter().zip(alpha) {
        if a == 0 {
            continue;
        }
        let l = g.lambda(a as usize);
        num += &l * chaos_grade(g, a as usize)?;
        den += l;
    }
    if den.is_zero() {
        return Err(Error::NotChaotic("constant multi-index".into()));
    }
    Ok(num / den)
}
