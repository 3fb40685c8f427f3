//! Orthogonal-polynomial eigenfunctions, chaotic degrees and chaos grades.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{expand_in_basis, Generator};
use crate::pearson::PearsonParams;
use crate::polycalc::Poly;
use crate::rational::{fmt_rational, int, Rational};

/// A monic eigenfunction `P_n` with `L P_n = eigenvalue · P_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenfunction {
    pub degree: usize,
    pub poly: Poly,
    pub eigenvalue: Rational,
    /// `λ_{2n}/λ_n` when the degree is chaotic.
    pub grade: Option<Rational>,
}

impl Serialize for Eigenfunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Eigenfunction", 4)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("poly", &self.poly.to_string())?;
        st.serialize_field("eigenvalue", &fmt_rational(&self.eigenvalue))?;
        st.serialize_field("grade", &self.grade.as_ref().map(fmt_rational))?;
        st.end()
    }
}

/// `-λ_n`; see [`Generator::eigenvalue`].
pub fn eigenvalue(gen: &Generator, n: usize) -> Result<Rational> {
    gen.eigenvalue(n)
}

/// Monic `P_n` by Gram–Schmidt on the exact moments, checked against the
/// eigen-equation.
pub fn orthopoly(gen: &Generator, n: usize) -> Result<Eigenfunction> {
    let basis = gram_schmidt(gen.params(), n)?;
    let poly = basis[n].clone();
    let eigenvalue = -gen.lambda(n);
    let lp = gen.apply_l(&poly);
    if lp != poly.scale(&eigenvalue) {
        return Err(Error::InvalidParams(format!("Gram–Schmidt P_{n} is not an eigenfunction")));
    }
    let grade = if n >= 1 && is_chaotic(gen.params(), n) { Some(chaos_grade(gen, n)?) } else { None };
    Ok(Eigenfunction { degree: n, poly, eigenvalue, grade })
}

/// Monic orthogonal polynomials `P_0..P_n`, needing moments up to `2n`.
pub fn gram_schmidt(params: &PearsonParams, n: usize) -> Result<Vec<Poly>> {
    let mom = params.moments(2 * n).map_err(|e| Error::MomentsInsufficient(format!("degree {n}: {e}")))?;
    let inner = |p: &Poly, q: &Poly| -> Rational {
        let pq = p * q;
        pq.coeffs().iter().zip(&mom).fold(Rational::zero(), |acc, (c, m)| acc + c * m)
    };
    let mut basis: Vec<Poly> = Vec::with_capacity(n + 1);
    let mut norms: Vec<Rational> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let xk = Poly::monomial(Rational::one(), k);
        let mut p = xk.clone();
        for (q, nq) in basis.iter().zip(&norms) {
            p = &p - &q.scale(&(inner(&xk, q) / nq));
        }
        let np = inner(&p, &p);
        if !np.is_positive() {
            return Err(Error::MomentsInsufficient(format!("degenerate inner product at degree {k}")));
        }
        basis.push(p);
        norms.push(np);
    }
    Ok(basis)
}

/// Degree `n` is chaotic iff `b2 < 1/(4n - 1)`.
pub fn is_chaotic(params: &PearsonParams, n: usize) -> bool {
    n >= 1 && params.b2() * int(4 * n as i64 - 1) < Rational::one()
}

/// `η_n = 2(1 + n/(n - 1 - 1/b2))` (2 when `b2 = 0`), checked against
/// `λ_{2n}/λ_n`.
pub fn chaos_grade(gen: &Generator, n: usize) -> Result<Rational> {
    if !is_chaotic(gen.params(), n) {
        return Err(Error::NotChaotic(format!(
            "degree {n} needs b2 < 1/{}, got b2 = {}",
            4 * n - 1,
            fmt_rational(gen.params().b2())
        )));
    }
    let b2 = gen.params().b2();
    let nr = int(n as i64);
    let eta = if b2.is_zero() {
        int(2)
    } else {
        int(2) * (Rational::one() + &nr / (&nr - Rational::one() - b2.recip()))
    };
    let ratio = gen.lambda(2 * n) / gen.lambda(n);
    assert_eq!(eta, ratio, "grade formula disagrees with the eigenvalue ratio");
    Ok(eta)
}

/// Coefficients of `F²` in the monic eigenbasis, keyed by degree; zero
/// coefficients are omitted.
pub fn square_expansion(gen: &Generator, f: &Eigenfunction) -> Result<BTreeMap<usize, Rational>> {
    if !is_chaotic(gen.params(), f.degree) {
        return Err(Error::NotChaotic(format!("degree {}", f.degree)));
    }
    let basis = gram_schmidt(gen.params(), 2 * f.degree)?;
    let sq = &f.poly * &f.poly;
    let coeffs = expand_in_basis(&sq, &basis);
    Ok(coeffs.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
}
