//! Stein's method for a target law given by its density: the diffusion
//! coefficient `σ²` with that law as invariant measure, the Stein equation
//! `τ f' - θ(x - m) f = h - E h(Z)` and sample-based Stein discrepancies.

use std::sync::Arc;

use serde::Serialize;

use crate::batch::{mean_and_se, SampleBatch};
use crate::error::{Error, Result};
use crate::pearson::{MomentOrder, PearsonLaw, PearsonParams, Support};
use crate::polycalc::Poly;
use crate::quad::{integrate, Tolerance};
use crate::rational::to_f64;

const TOL: Tolerance = Tolerance { abs: 1e-13, rel: 1e-11 };

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An absolutely continuous target with density `p` on `(l, u)`.
#[derive(Clone)]
pub struct DensityTarget {
    density: Density,
    support: Support,
    mean: f64,
    theta: f64,
    center: f64,
    scale: f64,
    /// `τ` in closed form, when known.
    tau_poly: Option<Poly>,
    max_moment: MomentOrder,
}

impl std::fmt::Debug for DensityTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DensityTarget")
            .field("support", &self.support)
            .field("mean", &self.mean)
            .field("theta", &self.theta)
            .finish_non_exhaustive()
    }
}

impl DensityTarget {
    /// `center` and `scale` locate the bulk of the mass for quadrature.
    pub fn new(
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: Support,
        theta: f64,
        center: f64,
        scale: f64,
    ) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParams("theta must be positive".into()));
        }
        let density: Density = Arc::new(density);
        let (l, u) = (support.lower, support.upper);
        let total = integrate(|x| density(x), l, u, center, scale, TOL)?.value;
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::NonNormalizable(format!("density integrates to {total}")));
        }
        // split at 0 so |x| has no kink inside a piece
        let abs_first = [(l, 0.0f64.clamp(l, u)), (0.0f64.clamp(l, u), u)]
            .into_iter()
            .map(|(a, b)| integrate(|x| x * density(x), a, b, center.clamp(a, b), scale, TOL).map(|q| q.value.abs()))
            .sum::<Result<f64>>()
            .map_err(|e| Error::NonNormalizable(format!("no first moment: {e}")))?;
        if !abs_first.is_finite() {
            return Err(Error::NonNormalizable("no first moment".into()));
        }
        let mean = integrate(|x| x * density(x), l, u, center, scale, TOL)?.value;
        Ok(DensityTarget {
            density,
            support,
            mean,
            theta,
            center,
            scale,
            tau_poly: None,
            max_moment: MomentOrder::Finite(1),
        })
    }

    /// A Pearson law, with the closed form `τ = θ b` attached for fast
    /// evaluation on samples.
    pub fn from_pearson(params: &PearsonParams) -> Result<Self> {
        let law = PearsonLaw::new(params.clone())?;
        let theta = to_f64(params.theta());
        let mean = to_f64(params.m());
        let scale = params.b_at(mean).sqrt();
        let support = params.support();
        let l2 = law.clone();
        let mut t = DensityTarget::new(move |x| l2.density(x), support, theta, mean, scale)?;
        t.mean = mean;
        t.tau_poly = Some(params.b_poly().scale(params.theta()));
        t.max_moment = params.max_moment_order();
        Ok(t)
    }

    pub fn density(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
        let c = self.center.clamp(a.min(b), a.max(b));
        Ok(integrate(f, a, b, c, self.scale, TOL)?.value)
    }

    /// `∫_l^x (y - m) p(y) dy`, from the tail nearer to `x`.
    fn partial_first_moment(&self, x: f64) -> Result<f64> {
        let m = self.mean;
        let f = |y: f64| (y - m) * self.density(y);
        if x <= m {
            self.integrate(f, self.support.lower, x)
        } else {
            Ok(-self.integrate(f, x, self.support.upper)?)
        }
    }

    /// `E h(Z)`.
    pub fn expect(&self, h: &dyn Fn(f64) -> f64) -> Result<f64> {
        self.integrate(|y| h(y) * self.density(y), self.support.lower, self.support.upper)
    }
}

/// `σ²(x) = -2θ ∫_l^x (y - m) p(y) dy / p(x)` for `x` in the support.
pub fn sigma2_from_density(target: &DensityTarget, x: f64) -> Result<f64> {
    if !target.support.contains(x) {
        return Err(Error::OutsideDomain(format!("x = {x} is outside the support {}", target.support)));
    }
    let p = target.density(x);
    if !(p > 0.0) {
        return Err(Error::UndefinedPoint(x));
    }
    let num = -2.0 * target.theta * target.partial_first_moment(x)?;
    Ok((num / p).max(0.0))
}

/// `τ(x) = σ²(x)/2` on the support and 0 elsewhere.
pub fn tau(target: &DensityTarget, x: f64) -> Result<f64> {
    if !target.support.contains(x) {
        return Ok(0.0);
    }
    match &target.tau_poly {
        Some(t) => Ok(t.eval_f64(x)),
        None => Ok(0.5 * sigma2_from_density(target, x)?),
    }
}

/// The solution `f_h` of the Stein equation for a fixed test function.
pub struct SteinSolution<'a> {
    target: &'a DensityTarget,
    h: &'a dyn Fn(f64) -> f64,
    eh: f64,
}

impl<'a> SteinSolution<'a> {
    pub fn new(target: &'a DensityTarget, h: &'a dyn Fn(f64) -> f64) -> Result<Self> {
        let eh = target.expect(h)?;
        Ok(SteinSolution { target, h, eh })
    }

    /// `E h(Z)`.
    pub fn mean_h(&self) -> f64 {
        self.eh
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let t = self.target;
        let m = t.mean;
        if !t.support.contains(x) {
            if x == m {
                return Err(Error::UndefinedPoint(x));
            }
            return Ok(-((self.h)(x) - self.eh) / (t.theta * (x - m)));
        }
        let g = |y: f64| ((self.h)(y) - self.eh) * t.density(y);
        let integral = if x <= m {
            t.integrate(g, t.support.lower, x)?
        } else {
            -t.integrate(g, x, t.support.upper)?
        };
        let tp = tau(t, x)? * t.density(x);
        if !(tp > 0.0) {
            return Err(Error::UndefinedPoint(x));
        }
        Ok(integral / tp)
    }

    /// `f_h'` read off the equation itself.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let t = self.target;
        let tx = tau(t, x)?;
        if !(tx > 0.0) {
            return Err(Error::UndefinedPoint(x));
        }
        let f = self.eval(x)?;
        Ok(((self.h)(x) - self.eh + t.theta * (x - t.mean) * f) / tx)
    }
}

/// `f_h(x)` for a single point.
pub fn stein_solution(target: &DensityTarget, h: &dyn Fn(f64) -> f64, x: f64) -> Result<f64> {
    SteinSolution::new(target, h)?.eval(x)
}

#[derive(Clone, Debug, Serialize)]
pub struct SteinTerm {
    pub degree: usize,
    pub value: f64,
    pub se: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SteinReport {
    /// `max_j |mean(τ φ_j' - θ (X - m) φ_j)|`.
    pub discrepancy: f64,
    pub terms: Vec<SteinTerm>,
    pub n: usize,
}

/// Largest test degree `j` for which `τ φ_j'` and `(x - m) φ_j` have finite
/// variance under the target, capped at `cap`.
pub fn admissible_degree(target: &DensityTarget, cap: usize) -> usize {
    match target.max_moment {
        MomentOrder::Infinite => cap,
        // need moments of order 2(j + 1)
        MomentOrder::Finite(p) => (p / 2).saturating_sub(1).min(cap),
    }
}

/// Stein discrepancy over `φ_j(x) = ((x - m)/s)^j`, `j = 0..=degree`, with
/// `s` the target's length scale.
pub fn stein_discrepancy(samples: &SampleBatch, target: &DensityTarget, degree: usize) -> Result<SteinReport> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample batch".into()));
    }
    let (m, th, s) = (target.mean, target.theta, target.scale);
    let taus: Vec<f64> = samples.values.iter().map(|&x| tau(target, x)).collect::<Result<_>>()?;
    let mut terms = Vec::with_capacity(degree + 1);
    for j in 0..=degree {
        let jf = j as f64;
        let vals = samples.values.iter().zip(&taus).map(|(&x, &t)| {
            let z = (x - m) / s;
            let phi = z.powi(j as i32);
            let dphi = if j == 0 { 0.0 } else { jf * z.powi(j as i32 - 1) / s };
            t * dphi - th * (x - m) * phi
        });
        let (value, se) = mean_and_se(vals);
        terms.push(SteinTerm { degree: j, value, se });
    }
    let discrepancy = terms.iter().map(|t| t.value.abs()).fold(0.0, f64::max);
    Ok(SteinReport { discrepancy, terms, n: samples.len() })
}
