//! The Pearson generator `Lf = θ(-(x - m)f' + b f'')` acting exactly on
//! polynomials, with its carré du champ `Γ(f, g) = θ b f'g'` and the
//! pseudo-inverse `L⁻¹` on the polynomial eigen-span.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::pearson::{MomentOrder, PearsonParams};
use crate::polycalc::Poly;
use crate::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    params: PearsonParams,
    theta: Rational,
}

impl Generator {
    pub fn new(params: PearsonParams) -> Self {
        let theta = params.theta().clone();
        Generator { params, theta }
    }

    /// Uses `theta` in `L` instead of the one stored in the parameters.
    pub fn with_theta(mut self, theta: Rational) -> Result<Self> {
        if !theta.is_positive() {
            return Err(Error::InvalidParams("theta must be positive".into()));
        }
        self.theta = theta;
        Ok(self)
    }

    pub fn params(&self) -> &PearsonParams {
        &self.params
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    pub fn drift_poly(&self) -> Poly {
        Poly::from_coeffs(vec![self.params.m().clone(), -Rational::one()])
    }

    pub fn apply_l(&self, f: &Poly) -> Poly {
        let drift = &self.drift_poly() * &f.derivative();
        let diffusion = &self.params.b_poly() * &f.diff(2);
        (&drift + &diffusion).scale(&self.theta)
    }

    /// `Γ(f, g) = θ b f' g'`.
    pub fn gamma(&self, f: &Poly, g: &Poly) -> Poly {
        let out = (&self.params.b_poly() * &(&f.derivative() * &g.derivative())).scale(&self.theta);
        debug_assert_eq!(out, self.gamma_by_definition(f, g));
        out
    }

    /// `Γ(f, g) = ½(L(fg) - f Lg - g Lf)`.
    pub fn gamma_by_definition(&self, f: &Poly, g: &Poly) -> Poly {
        let lfg = self.apply_l(&(f * g));
        let rest = &(f * &self.apply_l(g)) + &(g * &self.apply_l(f));
        (&lfg - &rest).scale(&Rational::new(1.into(), 2.into()))
    }

    /// `λ_n = n(1 - (n - 1)b2)θ`, so that `L P_n = -λ_n P_n`.
    pub fn lambda(&self, n: usize) -> Rational {
        let n_r = int(n as i64);
        &n_r * (Rational::one() - (&n_r - Rational::one()) * self.params.b2()) * &self.theta
    }

    /// The eigenvalue `-λ_n`, defined when the eigenfunction is square
    /// integrable: `b2 < 1/(2n - 1)`.
    pub fn eigenvalue(&self, n: usize) -> Result<Rational> {
        if !admits_degree(self.params.b2(), n) {
            return Err(Error::NotAnEigenvalue { degree: n });
        }
        Ok(-self.lambda(n))
    }

    /// Monic solution of `L P = -λ_n P`, by back-substitution in the monomial
    /// basis where `L` is triangular. Requires `λ_0..λ_n` distinct.
    pub fn eigenpoly(&self, n: usize) -> Result<Poly> {
        let (m, b0, b1) = (self.params.m(), self.params.b0(), self.params.b1());
        let ln = self.lambda(n);
        let mut a = vec![Rational::zero(); n + 1];
        a[n] = Rational::one();
        for j in (0..n).rev() {
            let gap = &ln - self.lambda(j);
            if gap.is_zero() {
                return Err(Error::NotAnEigenvalue { degree: n });
            }
            let jr = int(j as i64);
            let mut acc = (&jr + Rational::one()) * (m + &jr * b1) * &a[j + 1];
            if j + 2 <= n {
                acc += (&jr + int(2)) * (&jr + Rational::one()) * b0 * &a[j + 2];
            }
            a[j] = -(&self.theta * acc) / gap;
        }
        Ok(Poly::from_coeffs(a))
    }

    /// `∫ f dμ` from the exact moments.
    pub fn integrate(&self, f: &Poly) -> Result<Rational> {
        let Some(d) = f.degree() else { return Ok(Rational::zero()) };
        let mo = self.params.moments(d)?;
        Ok(f.coeffs().iter().zip(&mo).fold(Rational::zero(), |acc, (c, m)| acc + c * m))
    }

    /// Coefficients of `f` in the monic eigenbasis `P_0..P_deg`.
    pub fn eigen_expansion(&self, f: &Poly) -> Result<Vec<Rational>> {
        let Some(d) = f.degree() else { return Ok(Vec::new()) };
        let basis = (0..=d).map(|k| self.eigenpoly(k)).collect::<Result<Vec<_>>>()?;
        Ok(expand_in_basis(f, &basis))
    }

    /// `L⁻¹ f`: the zero-mean polynomial `u` with `L u = f - ∫ f dμ`.
    pub fn l_inverse(&self, f: &Poly) -> Result<Poly> {
        let Some(d) = f.degree() else { return Ok(Poly::zero()) };
        if !admits_degree(self.params.b2(), d) {
            return Err(Error::OutsideDomain(format!(
                "degree {d} eigenfunctions are not square integrable for b2 = {}",
                crate::rational::fmt_rational(self.params.b2())
            )));
        }
        let coeffs = self.eigen_expansion(f)?;
        let mut out = Poly::zero();
        for (k, c) in coeffs.iter().enumerate().skip(1) {
            if !c.is_zero() {
                out = &out + &self.eigenpoly(k)?.scale(&(-c / self.lambda(k)));
            }
        }
        debug_assert_eq!(self.apply_l(&out), f - &Poly::constant(coeffs[0].clone()));
        Ok(out)
    }

    /// Highest degree with square-integrable eigenfunctions, `None` when all are.
    pub fn max_degree(&self) -> Option<usize> {
        let b2 = self.params.b2();
        if !b2.is_positive() {
            return None;
        }
        // largest n with 2n - 1 < 1/b2
        let bound = (b2.recip() + Rational::one()) / int(2);
        let n = bound.ceil() - Rational::one();
        Some(num_traits::ToPrimitive::to_usize(&n.to_integer()).unwrap_or(usize::MAX))
    }

    pub fn moment_order(&self) -> MomentOrder {
        self.params.max_moment_order()
    }
}

/// `b2 < 1/(2n - 1)`, i.e. `b2 (2n - 1) < 1`.
pub(crate) fn admits_degree(b2: &Rational, n: usize) -> bool {
    n == 0 || b2 * int(2 * n as i64 - 1) < Rational::one()
}

/// Triangular expansion of `f` in a monic basis `basis[k]` of degree `k`.
pub(crate) fn expand_in_basis(f: &Poly, basis: &[Poly]) -> Vec<Rational> {
    let mut rest = f.clone();
    let mut out = vec![Rational::zero(); basis.len()];
    while let Some(d) = rest.degree() {
        let c = rest.coeff(d);
        rest = &rest - &basis[d].scale(&c);
        out[d] = c;
    }
    out
}
