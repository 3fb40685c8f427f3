//! Moment bounds for chaotic eigenfunctions against a Pearson target.
//!
//! For a target with mean `m` and `b = b2 x² + b1 x + b0`, and `G = F + m`
//! with `F` chaotic of grade `η`, the squared carré du champ discrepancy is
//! bounded by a linear combination of the first four moments of `G`.

use std::io::Write;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::pearson::PearsonParams;
use crate::polycalc::{MPoly, Poly, SurdPoly};
use crate::rational::{int, rat, to_f64, Rational, Surd};
use crate::tensor::ChaosElement;

/// A Pearson target with four moments, held with `θ = 1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetSpec {
    params: PearsonParams,
    original_theta: Rational,
}

impl TargetSpec {
    pub fn new(params: PearsonParams) -> Result<Self> {
        if params.b2() * int(3) >= Rational::one() {
            return Err(Error::MomentsInsufficient(format!(
                "targets need four moments, i.e. b2 < 1/3 (b2 = {})",
                crate::rational::fmt_rational(params.b2())
            )));
        }
        let original_theta = params.theta().clone();
        let params = params.with_theta(rat(1, 2))?;
        Ok(TargetSpec { params, original_theta })
    }

    pub fn params(&self) -> &PearsonParams {
        &self.params
    }

    /// `θ` of the parameters as given, before normalization.
    pub fn original_theta(&self) -> &Rational {
        &self.original_theta
    }

    pub fn m(&self) -> &Rational {
        self.params.m()
    }

    pub fn b2(&self) -> &Rational {
        self.params.b2()
    }

    /// `η̃ = 2(1 - b2)`, the grade of the target's own first chaos.
    pub fn eta_tilde(&self) -> Rational {
        int(2) * (Rational::one() - self.b2())
    }
}

/// `Q(x) = x² + 2(b1+m)/(2b2-1) x + (b0 + m(b1+m)/(2b2-1))/(b2-1)`.
pub fn q_poly(target: &TargetSpec) -> Result<Poly> {
    let p = target.params();
    let (m, b0, b1, b2) = (p.m(), p.b0(), p.b1(), p.b2());
    let d1 = int(2) * b2 - Rational::one();
    let d2 = b2 - Rational::one();
    if d1.is_zero() || d2.is_zero() {
        return Err(Error::InvalidParams("Q is undefined for b2 = 1/2 or b2 = 1".into()));
    }
    let s = b1 + m;
    let lin = int(2) * &s / &d1;
    let cst = (b0 + m * &s / &d1) / &d2;
    Ok(Poly::from_coeffs(vec![cst, lin, Rational::one()]))
}

/// `U(x) = (1 - b2) Q(x)² - (1/12) Q'(x)³ (x - m)`.
pub fn u_poly(target: &TargetSpec) -> Result<Poly> {
    let q = q_poly(target)?;
    let qp = q.derivative();
    let shift = Poly::from_coeffs(vec![-target.m().clone(), Rational::one()]);
    let first = (&q * &q).scale(&(Rational::one() - target.b2()));
    let second = (&qp.pow(3) * &shift).scale(&rat(1, 12));
    Ok(&first - &second)
}

/// Coefficients `c_j` of `U` and `d_j` of `Q²`, `j = 0..4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UqCoefficients {
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub c: Vec<Rational>,
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub d: Vec<Rational>,
}

/// By expanding `U` and `Q²`.
pub fn uq_coefficients(target: &TargetSpec) -> Result<UqCoefficients> {
    let u = u_poly(target)?;
    let q = q_poly(target)?;
    let q2 = &q * &q;
    Ok(UqCoefficients { c: (0..=4).map(|j| u.coeff(j)).collect(), d: (0..=4).map(|j| q2.coeff(j)).collect() })
}

/// The tabulated closed forms for the same coefficients. `d_2` carries the
/// denominator `(b2 - 1)(1 - 2b2)²`; the commonly printed `(1 - b2)` has the
/// wrong sign.
pub fn table_coefficients(target: &TargetSpec) -> UqCoefficients {
    let p = target.params();
    let (m, b0, b1, b2) = (p.m().clone(), p.b0().clone(), p.b1().clone(), p.b2().clone());
    let one = Rational::one;
    let s = &b1 + &m;
    let a = &b0 + &m * &s / (int(2) * &b2 - one());
    let t = one() - int(2) * &b2;
    let u = int(2) * &b2 - one();
    let cube = |x: &Rational| x * x * x;
    let c = vec![
        &a * &a / (one() - &b2) + int(2) * &m * cube(&s) / (int(3) * cube(&u)),
        int(4) * &b0 * &s / &t + int(2) * &s * &s * (&b1 + int(2) * &m * (int(3) * &b2 - one())) / (int(3) * cube(&t)),
        -int(2) * &b0 - int(2) * &s * &s / &u,
        -int(2) * &b1 - int(4) * &m / int(3),
        rat(1, 3) - &b2,
    ];
    let e = &b0 * &u + &m * &s;
    let d = vec![
        &e * &e / (&t * &t * (one() - &b2) * (one() - &b2)),
        int(4) * &s * &e / (&t * &t * (&b2 - one())),
        int(2) * (&b0 * &t * &t + &s * (int(2) * &b1 * (&b2 - one()) + (int(4) * &b2 - int(3)) * &m))
            / ((&b2 - one()) * &t * &t),
        int(4) * &s / &u,
        one(),
    ];
    UqCoefficients { c, d }
}

/// `(Σ c_j m_j, Σ d_j m_j)` with `m_0 = 1` and `moments = [m_1, m_2, m_3, m_4]`.
pub fn moment_combination(target: &TargetSpec, moments: &[Surd]) -> Result<(Surd, Surd)> {
    if moments.len() != 4 {
        return Err(Error::InvalidInput(format!("expected m_1..m_4, got {} moments", moments.len())));
    }
    let k = uq_coefficients(target)?;
    let mut u = Surd::from_rational(k.c[0].clone());
    let mut q = Surd::from_rational(k.d[0].clone());
    for (j, mj) in moments.iter().enumerate() {
        u = &u + &mj.scale(&k.c[j + 1]);
        q = &q + &mj.scale(&k.d[j + 1]);
    }
    Ok((u, q))
}

/// Floating-point version for empirical moments.
pub fn moment_combination_f64(target: &TargetSpec, moments: &[f64; 4]) -> Result<(f64, f64)> {
    let k = uq_coefficients(target)?;
    let u = to_f64(&k.c[0]) + moments.iter().enumerate().map(|(j, m)| to_f64(&k.c[j + 1]) * m).sum::<f64>();
    let q = to_f64(&k.d[0]) + moments.iter().enumerate().map(|(j, m)| to_f64(&k.d[j + 1]) * m).sum::<f64>();
    Ok((u, q))
}

fn map_moments_error(e: Error) -> Error {
    match e {
        Error::MomentDoesNotExist { order, max } => Error::MomentsInsufficient(format!(
            "a coordinate moment of order {order} is needed but only {max} exist"
        )),
        other => other,
    }
}

/// `G = m + √s·F0` as a surd polynomial.
fn shifted(el: &ChaosElement, body: &MPoly, m: &Rational) -> SurdPoly {
    SurdPoly::new(MPoly::constant(body.dim(), m.clone()), body.clone(), el.scale_sq().clone())
}

/// `Γ(G, -L⁻¹G) - b(G)` for an explicit element.
fn discrepancy(el: &ChaosElement, target: &TargetSpec) -> Result<SurdPoly> {
    let gen = el.generator();
    let body = el.body_poly()?;
    let inv = gen.l_inverse_n(&body)?;
    debug_assert_eq!(inv, body.scale(&-el.lambda().recip()));
    let gamma = gen.gamma_n(&body, &-&inv)?.scale(el.scale_sq());
    let g = shifted(el, &body, target.m());
    let bg = SurdPoly::compose_into(&target.params().b_poly(), &g);
    Ok(SurdPoly::from_mpoly(gamma).sub(&bg))
}

/// `∫ (Γ(G, -L⁻¹G) - b(G))² dμ` exactly, with `G = F + m`.
pub fn lhs_exact(el: &ChaosElement, target: &TargetSpec) -> Result<Surd> {
    let d = discrepancy(el, target)?;
    integrate_square(el, &d).map_err(map_moments_error)
}

fn integrate_square(el: &ChaosElement, d: &SurdPoly) -> Result<Surd> {
    let gen = el.generator();
    let (e, o) = (d.even(), d.odd());
    let ee = gen.integrate_product(e, e)?;
    if o.is_zero() {
        return Ok(Surd::from_rational(ee));
    }
    let s = d.radicand();
    let oo = gen.integrate_product(o, o)?;
    let eo = gen.integrate_product(e, o)?;
    Ok(Surd::new(ee + s * oo, int(2) * eo, s.clone()))
}

/// `(Γ(G, -L⁻¹G) - b(G)) - (1/(2λ))(L + 2(1 - b2)λ) Q(G)` with the element's own `λ`.
pub fn eq36_residual(el: &ChaosElement, target: &TargetSpec) -> Result<SurdPoly> {
    eq36_residual_with_lambda(el, target, el.lambda())
}

/// As [`eq36_residual`] but with `λ` on the right-hand side supplied by the
/// caller, e.g. computed under a different `θ` than the one in `L`.
pub fn eq36_residual_with_lambda(el: &ChaosElement, target: &TargetSpec, lambda: &Rational) -> Result<SurdPoly> {
    if !lambda.is_positive() {
        return Err(Error::InvalidInput("lambda must be positive".into()));
    }
    let gen = el.generator();
    let body = el.body_poly()?;
    let lhs = discrepancy(el, target)?;
    let qg = SurdPoly::compose_into(&q_poly(target)?, &shifted(el, &body, target.m()));
    let lq = qg.map_linear(|p| gen.apply_ln(p))?;
    let coef = int(2) * (Rational::one() - target.b2()) * lambda;
    let rhs = lq.add(&qg.scale(&coef)).scale(&(int(2) * lambda).recip());
    Ok(lhs.sub(&rhs))
}

/// [`eq36_residual`] for `G = m + P_n` with `P_n` the monic eigenpolynomial
/// of `gen`. Works for every admitted degree, chaotic or not.
pub fn eq36_residual_univariate(gen: &Generator, n: usize, target: &TargetSpec) -> Result<Poly> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let p = gen.eigenpoly(n)?;
    let lambda = gen.lambda(n);
    let g = &p + &Poly::constant(target.m().clone());
    let inv = gen.l_inverse(&p)?;
    let lhs = &gen.gamma(&g, &-&inv) - &target.params().b_poly().compose(&g);
    let qg = q_poly(target)?.compose(&g);
    let coef = int(2) * (Rational::one() - target.b2()) * &lambda;
    let rhs = (&gen.apply_l(&qg) + &qg.scale(&coef)).scale(&(int(2) * &lambda).recip());
    Ok(&lhs - &rhs)
}

/// `Γ(x, -L⁻¹x) - θ⁻¹τ(x)` for the target's own generator, with
/// `τ = θ b` on the support.
pub fn characterization_residual(params: &PearsonParams) -> Result<Poly> {
    let gen = Generator::new(params.clone());
    let x = Poly::x();
    let inv = gen.l_inverse(&x)?;
    let gamma = gen.gamma(&x, &-&inv);
    let tau = params.b_poly().scale(gen.theta());
    Ok(&gamma - &tau.scale(&gen.theta().recip()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    LowGrade,
    HighGrade,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub label: String,
    #[serde(with = "crate::rational::serde_rational")]
    pub eta: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub eta_tilde: Rational,
    /// `max(η - η̃, 0)`.
    #[serde(with = "crate::rational::serde_rational")]
    pub xi: Rational,
    pub regime: Regime,
    pub u_int: Surd,
    pub q2_int: Surd,
    pub lhs_exact: Option<Surd>,
    pub rhs_sq: Surd,
    pub inequality_holds: Option<bool>,
    pub c_h: f64,
    /// `c_H √rhs_sq`, up to the unknown Stein constant.
    pub bound: f64,
    /// Factor applied to the element's generator so that its fastest
    /// coordinate has `θ = 1/2`. Nothing reported depends on it.
    #[serde(with = "crate::rational::serde_rational")]
    pub theta_rescale: Rational,
    /// The measure the integrals are taken under.
    pub measure: String,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundOptions {
    pub c_h: f64,
    /// Compute `lhs_exact` when the element can be expanded.
    pub exact_lhs: bool,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { c_h: 1.0, exact_lhs: true }
    }
}

/// The moment bound for `G = F + m` against `target`.
pub fn bound(el: &ChaosElement, target: &TargetSpec, opts: BoundOptions) -> Result<BoundReport> {
    if !(opts.c_h > 0.0 && opts.c_h.is_finite()) {
        return Err(Error::InvalidInput("c_H must be positive".into()));
    }
    let theta_max = el.generator().coords().iter().map(|g| g.theta().clone()).max().unwrap_or_else(Rational::one);
    let theta_rescale = (int(2) * theta_max).recip();
    let el = el.rescaled(&theta_rescale)?;

    let eta = el.grade().clone();
    let eta_tilde = target.eta_tilde();
    let gap = &eta - &eta_tilde;
    let (regime, xi) = if gap.is_positive() { (Regime::HighGrade, gap) } else { (Regime::LowGrade, Rational::zero()) };

    let g = el.shifted_moments(target.m(), 4).map_err(map_moments_error)?;
    let (u_int, q2_int) = moment_combination(target, &g[1..])?;
    let one_minus = Rational::one() - target.b2();
    let cu = int(2) * (&one_minus - &eta / int(4));
    let cq = &xi * &one_minus / int(2);
    let rhs_sq = &u_int.scale(&cu) + &q2_int.scale(&cq);
    if rhs_sq.signum() < 0 {
        return Err(Error::NegativeBound(format!("rhs = {rhs_sq}")));
    }
    let lhs = if opts.exact_lhs && el.is_materializable() {
        match lhs_exact(&el, target) {
            Ok(v) => Some(v),
            Err(Error::MomentsInsufficient(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let inequality_holds = lhs.as_ref().map(|l| l <= &rhs_sq);
    let bound = opts.c_h * rhs_sq.to_f64().max(0.0).sqrt();
    let measure = format!(
        "product of the element's {} coordinate laws",
        el.dim()
    );
    Ok(BoundReport {
        label: el.label().to_string(),
        eta,
        eta_tilde,
        xi,
        regime,
        u_int,
        q2_int,
        lhs_exact: lhs,
        rhs_sq,
        inequality_holds,
        c_h: opts.c_h,
        bound,
        theta_rescale,
        measure,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    /// `∫U(G_k) dμ_k → 0`, judged by the last value.
    pub condition_i: bool,
    /// Along the high-grade subsequence, `∫Q²` stays bounded and `η_k → η̃`.
    pub condition_ii: bool,
    pub converges: bool,
    pub last_u: f64,
    pub high_grade_count: usize,
    pub sup_q2_high: Option<f64>,
    pub eta_gaps: Vec<f64>,
    /// Each `∫ · dμ_k` is taken under the invariant measure of the `k`-th
    /// element's own generator.
    pub measure: String,
}

/// Finite-sequence reading of the two sufficient conditions for
/// convergence in distribution.
pub fn convergence_conditions(reports: &[BoundReport], tol: f64) -> Result<Verdict> {
    let last = reports.last().ok_or_else(|| Error::InvalidInput("empty report sequence".into()))?;
    let last_u = last.u_int.to_f64();
    let condition_i = last_u.abs() <= tol;
    let high: Vec<&BoundReport> = reports.iter().filter(|r| r.regime == Regime::HighGrade).collect();
    let eta_gaps: Vec<f64> = high.iter().map(|r| to_f64(&(&r.eta - &r.eta_tilde))).collect();
    let sup_q2_high = high.iter().map(|r| r.q2_int.to_f64()).reduce(f64::max);
    let q2_bounded = sup_q2_high.is_none_or(f64::is_finite);
    let gaps_shrink = match eta_gaps.as_slice() {
        [] => true,
        [.., g] if *g <= tol => true,
        gs => gs.len() >= 2 && gs.windows(2).all(|w| w[1] < w[0]),
    };
    let condition_ii = q2_bounded && gaps_shrink;
    Ok(Verdict {
        condition_i,
        condition_ii,
        converges: condition_i && condition_ii,
        last_u,
        high_grade_count: high.len(),
        sup_q2_high,
        eta_gaps,
        measure: "invariant measure of each element's own generator".into(),
    })
}

/// CSV with columns `k, eta, xi, U_int, Q2_int, rhs_sq, bound`.
pub fn write_bound_csv<W: Write>(rows: &[(usize, BoundReport)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "eta", "xi", "U_int", "Q2_int", "rhs_sq", "bound"])?;
    for (k, r) in rows {
        w.write_record([
            k.to_string(),
            to_f64(&r.eta).to_string(),
            to_f64(&r.xi).to_string(),
            r.u_int.to_f64().to_string(),
            r.q2_int.to_f64().to_string(),
            r.rhs_sq.to_f64().to_string(),
            r.bound.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
