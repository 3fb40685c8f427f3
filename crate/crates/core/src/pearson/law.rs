use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, FisherF, Gamma, Normal, StudentT};
use statrs::function::beta::ln_beta;
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use super::{Classification, PearsonClass, PearsonParams};
use crate::batch::{Provenance, SampleBatch};
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::rational::to_f64;
use crate::rng::fill_chunked;

/// The stationary law of a Pearson diffusion with its normalizing constant
/// resolved. Immutable once built, so it can be shared across threads.
#[derive(Clone, Debug)]
pub struct PearsonLaw {
    params: PearsonParams,
    classification: Classification,
    /// Log normalizer of the standard skew t; zero for the other classes.
    skew_log_norm: f64,
}

impl PearsonLaw {
    pub fn new(params: PearsonParams) -> Result<Self> {
        let classification = params.classify();
        let skew_log_norm = match classification.class {
            PearsonClass::SkewT { m, nu, .. } => {
                let g = |z: f64| (-m * z.mul_add(z, 1.0).ln() - nu * z.atan()).exp();
                let q = integrate(g, f64::NEG_INFINITY, f64::INFINITY, 0.0, 1.0, Tolerance { abs: 1e-15, rel: 1e-13 })?;
                if !(q.value > 0.0 && q.value.is_finite()) {
                    return Err(Error::NonNormalizable(format!("skew t normalizer {}", q.value)));
                }
                q.value.ln()
            }
            _ => 0.0,
        };
        Ok(PearsonLaw { params, classification, skew_log_norm })
    }

    pub fn params(&self) -> &PearsonParams {
        &self.params
    }

    pub fn classification(&self) -> &Classification {
        &self.classification
    }

    /// Log density of the standard member of the class.
    fn log_density_std(&self, y: f64) -> f64 {
        let ninf = f64::NEG_INFINITY;
        match self.classification.class {
            PearsonClass::Gaussian { variance } => -0.5 * y * y / variance - 0.5 * (2.0 * PI * variance).ln(),
            PearsonClass::Gamma { alpha, beta } => {
                if y <= 0.0 {
                    return ninf;
                }
                alpha * beta.ln() - ln_gamma(alpha) + (alpha - 1.0) * y.ln() - beta * y
            }
            PearsonClass::Beta { alpha, beta } => {
                if y <= 0.0 || y >= 1.0 {
                    return ninf;
                }
                (alpha - 1.0) * y.ln() + (beta - 1.0) * (-y).ln_1p() - ln_beta(alpha, beta)
            }
            PearsonClass::SkewT { m, nu, lambda, alpha } => {
                let z = (y - lambda) / alpha;
                -m * z.mul_add(z, 1.0).ln() - nu * z.atan() - alpha.ln() - self.skew_log_norm
            }
            PearsonClass::InverseGamma { alpha, beta } => {
                if y <= 0.0 {
                    return ninf;
                }
                alpha * beta.ln() - ln_gamma(alpha) - (alpha + 1.0) * y.ln() - beta / y
            }
            PearsonClass::F { d1, d2 } => {
                if y <= 0.0 {
                    return ninf;
                }
                0.5 * (d1 * (d1 * y).ln() + d2 * d2.ln() - (d1 + d2) * d1.mul_add(y, d2).ln())
                    - y.ln()
                    - ln_beta(0.5 * d1, 0.5 * d2)
            }
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        if !self.params.support().contains(x) {
            return f64::NEG_INFINITY;
        }
        let Classification { loc, scale, .. } = self.classification;
        self.log_density_std((x - loc) / scale) - scale.abs().ln()
    }

    /// Normalized density, zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    fn length_scale(&self) -> f64 {
        let s = self.params.b_at(to_f64(self.params.m())).sqrt();
        if s.is_finite() && s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// `P(X <= x)`: `erfc` for the Gaussian, otherwise quadrature of the
    /// density from the nearer tail.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::UndefinedPoint(x));
        }
        let sup = self.params.support();
        if x <= sup.lower {
            return Ok(0.0);
        }
        if x >= sup.upper {
            return Ok(1.0);
        }
        if let PearsonClass::Gaussian { variance } = self.classification.class {
            let m = to_f64(self.params.m());
            return Ok(0.5 * erfc(-(x - m) / (2.0 * variance).sqrt()));
        }
        self.cdf_by_quadrature(x)
    }

    /// Inverse of [`cdf`](Self::cdf) by bracketing and bisection.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidInput(format!("quantile level must lie in (0, 1), got {p}")));
        }
        let sup = self.params.support();
        let m = to_f64(self.params.m());
        let s = self.length_scale();
        let (mut lo, mut hi) = (m - s, m + s);
        let mut step = s;
        while lo > sup.lower && self.cdf(lo)? > p {
            step *= 2.0;
            lo = (m - step).max(sup.lower);
        }
        step = s;
        while hi < sup.upper && self.cdf(hi)? < p {
            step *= 2.0;
            hi = (m + step).min(sup.upper);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid)? < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn cdf_by_quadrature(&self, x: f64) -> Result<f64> {
        let sup = self.params.support();
        if x <= sup.lower {
            return Ok(0.0);
        }
        if x >= sup.upper {
            return Ok(1.0);
        }
        let m = to_f64(self.params.m());
        let s = self.length_scale();
        let tol = Tolerance { abs: 1e-13, rel: 1e-11 };
        let f = |t: f64| self.density(t);
        let v = if x <= m {
            integrate(f, sup.lower, x, x.min(m), s, tol)?.value
        } else {
            1.0 - integrate(f, x, sup.upper, x.max(m), s, tol)?.value
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// Fills a slice with i.i.d. draws from a caller-owned stream.
    pub(crate) fn filler(&self) -> Result<impl Fn(&mut ChaCha8Rng, &mut [f64]) + Sync + use<>> {
        let sampler = self.sampler()?;
        let Classification { loc, scale, .. } = self.classification;
        Ok(move |rng: &mut ChaCha8Rng, out: &mut [f64]| {
            for v in out.iter_mut() {
                *v = loc + scale * sampler.draw(rng);
            }
        })
    }

    fn sampler(&self) -> Result<StdSampler> {
        let bad = |e: &dyn std::fmt::Display| Error::InvalidParams(format!("sampler: {e}"));
        Ok(match self.classification.class {
            PearsonClass::Gaussian { variance } => StdSampler::Normal(Normal::new(0.0, variance.sqrt()).map_err(|e| bad(&e))?),
            PearsonClass::Gamma { alpha, beta } => StdSampler::Gamma(Gamma::new(alpha, 1.0 / beta).map_err(|e| bad(&e))?),
            PearsonClass::Beta { alpha, beta } => StdSampler::Beta(Beta::new(alpha, beta).map_err(|e| bad(&e))?),
            PearsonClass::InverseGamma { alpha, beta } => {
                StdSampler::InverseGamma(Gamma::new(alpha, 1.0).map_err(|e| bad(&e))?, beta)
            }
            PearsonClass::F { d1, d2 } => StdSampler::F(FisherF::new(d1, d2).map_err(|e| bad(&e))?),
            PearsonClass::SkewT { m, nu, lambda, alpha } => {
                let dof = 2.0 * m - 1.0;
                StdSampler::SkewT {
                    t: StudentT::new(dof).map_err(|e| bad(&e))?,
                    shrink: dof.sqrt().recip(),
                    nu,
                    lambda,
                    alpha,
                }
            }
        })
    }

    /// `n` i.i.d. draws, reproducible from `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Result<SampleBatch> {
        if n == 0 {
            return Err(Error::InvalidInput("sample size must be at least 1".into()));
        }
        let fill = self.filler()?;
        let mut values = vec![0.0; n];
        fill_chunked(&mut values, seed, 0, fill);
        Ok(SampleBatch {
            values,
            seed,
            provenance: Provenance::DirectSampler { class: self.classification.class.name().to_string() },
        })
    }
}

enum StdSampler {
    Normal(Normal<f64>),
    Gamma(Gamma<f64>),
    Beta(Beta<f64>),
    InverseGamma(Gamma<f64>, f64),
    F(FisherF<f64>),
    /// Rejection from a Student t envelope: with `z = t/√(2m-1)` the
    /// envelope is `∝ (1+z²)^(-m)` and the acceptance ratio is
    /// `exp(-ν atan z - |ν|π/2) <= 1`.
    SkewT { t: StudentT<f64>, shrink: f64, nu: f64, lambda: f64, alpha: f64 },
}

impl StdSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            StdSampler::Normal(d) => d.sample(rng),
            StdSampler::Gamma(d) => d.sample(rng),
            StdSampler::Beta(d) => d.sample(rng),
            StdSampler::InverseGamma(d, beta) => beta / d.sample(rng),
            StdSampler::F(d) => d.sample(rng),
            StdSampler::SkewT { t, shrink, nu, lambda, alpha } => loop {
                let z = t.sample(rng) * shrink;
                let log_accept = -nu * z.atan() - nu.abs() * FRAC_PI_2;
                let u: f64 = rng.random();
                if u.ln() < log_accept {
                    break lambda + alpha * z;
                }
            },
        }
    }
}
