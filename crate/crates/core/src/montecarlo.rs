//! Euler–Maruyama simulation of Pearson diffusions, empirical distances and
//! convergence experiments for chaos families.

use std::io::Write;
use std::path::PathBuf;

use num_traits::{Signed, Zero};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::batch::{mean_and_se, Provenance, SampleBatch};
use crate::error::{Error, Result};
use crate::fourmoments::{bound, q_poly, u_poly, BoundOptions, TargetSpec};
use crate::pearson::{PearsonLaw, PearsonParams, Support};
use crate::polycalc::Poly;
use crate::rational::{serde_rational, to_f64, Rational};
use crate::rng::{stream, CHUNK};
use crate::tensor::{ChaosBody, ChaosDescriptor, ChaosElement, Kernel};

/// Distance kept from a finite support boundary after a step leaves it.
pub const BOUNDARY_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct SdeOptions {
    pub dt: f64,
    /// Steps per chain after burn-in.
    pub steps: usize,
    /// Record every `thin`-th state.
    pub thin: usize,
    /// Independent chains, each with its own stream and burn-in.
    pub chains: usize,
    /// Defaults to `max(10/(θ dt), 10⁴)`.
    pub burn_in: Option<usize>,
}

impl Default for SdeOptions {
    fn default() -> Self {
        SdeOptions { dt: 1e-3, steps: 1_000_000, thin: 10, chains: 1, burn_in: None }
    }
}

/// `dX = -θ(X - m) dt + √(2θ b(X)) dB`, discretized explicitly.
pub fn euler_maruyama(params: &PearsonParams, x0: f64, opts: &SdeOptions, seed: u64) -> Result<SampleBatch> {
    let theta = to_f64(params.theta());
    let SdeOptions { dt, steps, thin, chains, .. } = *opts;
    if !(dt > 0.0 && dt * theta < 0.5) {
        return Err(Error::InvalidInput(format!("need 0 < dt·θ < 1/2, got dt = {dt}, θ = {theta}")));
    }
    if thin == 0 || chains == 0 {
        return Err(Error::InvalidInput("thin and chains must be positive".into()));
    }
    if !params.support().contains(x0) {
        return Err(Error::OutsideDomain(format!("x0 = {x0} is not interior to {}", params.support())));
    }
    let burn_in = opts.burn_in.unwrap_or_else(|| ((10.0 / theta / dt).ceil() as usize).max(10_000));
    let chain = SdeChain {
        theta,
        m: to_f64(params.m()),
        b: params.b_poly().to_f64_coeffs(),
        support: params.support(),
        dt,
    };
    let runs: Vec<Vec<f64>> = (0..chains)
        .into_par_iter()
        .map(|c| chain.run(x0, burn_in, steps, thin, seed, c as u32))
        .collect::<Result<_>>()?;
    Ok(SampleBatch {
        values: runs.concat(),
        seed,
        provenance: Provenance::Sde { dt, steps, burn_in, thin },
    })
}

struct SdeChain {
    theta: f64,
    m: f64,
    b: Vec<f64>,
    support: Support,
    dt: f64,
}

impl SdeChain {
    fn diffusion(&self, x: f64) -> Result<f64> {
        let v = self.b.iter().rev().fold(0.0, |acc, c| acc * x + c);
        if v < -1e-10 {
            return Err(Error::NegativeDiffusion { x, value: v });
        }
        Ok((2.0 * self.theta * v.max(0.0)).sqrt())
    }

    fn clamp(&self, x: f64) -> f64 {
        let Support { lower, upper } = self.support;
        if x <= lower {
            lower + BOUNDARY_EPS * lower.abs().max(1.0)
        } else if x >= upper {
            upper - BOUNDARY_EPS * upper.abs().max(1.0)
        } else {
            x
        }
    }

    fn run(&self, x0: f64, burn_in: usize, steps: usize, thin: usize, seed: u64, chain: u32) -> Result<Vec<f64>> {
        let mut rng = stream(seed, chain, 0);
        let sq = self.dt.sqrt();
        let mut x = x0;
        let mut out = Vec::with_capacity(steps / thin);
        for i in 0..burn_in + steps {
            let z: f64 = StandardNormal.sample(&mut rng);
            x = self.clamp(x - self.theta * (x - self.m) * self.dt + self.diffusion(x)? * sq * z);
            if i >= burn_in && (i - burn_in + 1).is_multiple_of(thin) {
                out.push(x);
            }
        }
        Ok(out)
    }
}

/// A distribution function to compare samples against.
pub trait Cdf {
    fn cdf(&self, x: f64) -> Result<f64>;
}

impl Cdf for PearsonLaw {
    fn cdf(&self, x: f64) -> Result<f64> {
        PearsonLaw::cdf(self, x)
    }
}

/// `sup_x |F_n(x) - F(x)|` for a continuous `F`.
pub fn kolmogorov_distance(samples: &SampleBatch, target: &(impl Cdf + Sync)) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample batch".into()));
    }
    let mut xs = samples.values.clone();
    xs.par_sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    let cdfs: Vec<f64> = xs.par_iter().map(|&x| target.cdf(x)).collect::<Result<_>>()?;
    Ok(cdfs
        .iter()
        .enumerate()
        .map(|(i, &f)| ((i + 1) as f64 / n - f).max(f - i as f64 / n))
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0))
}

/// `sup_x |F_a(x) - F_b(x)|` between two empirical distribution functions.
pub fn kolmogorov_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Lower estimate of the Fortet–Mourier distance: the largest mean gap over
/// a finite dictionary of functions bounded by 1 with Lipschitz constant at
/// most 1. The dictionary holds ramps `clip(x - c, -1, 1)` and hats of
/// several widths centred on quantiles of the pooled sample.
pub fn bounded_lipschitz_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().filter(|x| x.is_finite()).collect();
    if pooled.is_empty() {
        return Err(Error::InvalidInput("no finite sample values".into()));
    }
    pooled.sort_unstable_by(f64::total_cmp);
    let q = |p: f64| pooled[((p * (pooled.len() - 1) as f64).round() as usize).min(pooled.len() - 1)];
    const GRID: usize = 48;
    let centres: Vec<f64> = (0..GRID).map(|i| q((i as f64 + 0.5) / GRID as f64)).collect();
    let spread = (q(0.75) - q(0.25)).max(1e-12);
    let mut dict: Vec<(f64, f64)> = Vec::new(); // (centre, width); width 0 marks a ramp
    for &c in &centres {
        dict.push((c, 0.0));
        for w in [0.125, 0.25, 0.5, 1.0, 2.0] {
            dict.push((c, w * spread));
        }
    }
    let eval = |x: f64, (c, w): (f64, f64)| -> f64 {
        if w == 0.0 {
            (x - c).clamp(-1.0, 1.0)
        } else {
            w.min(1.0) * (1.0 - (x - c).abs() / w).max(0.0)
        }
    };
    let mean = |xs: &[f64], f: (f64, f64)| xs.iter().map(|&x| eval(x, f)).sum::<f64>() / xs.len() as f64;
    Ok(dict.par_iter().map(|&f| (mean(a, f) - mean(b, f)).abs()).reduce(|| 0.0, f64::max))
}

/// `n` draws of `shift + F` with the coordinates of `F` sampled from their
/// own laws. Coordinate `i` of row chunk `c` comes from stream `(seed, i, c)`.
pub fn chaos_sample(el: &ChaosElement, shift: f64, seed: u64, n: usize) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    let scale = to_f64(el.scale_sq()).sqrt();
    let chunks: Vec<Vec<f64>> = match el.body() {
        ChaosBody::Homogeneous(h) => {
            let law = h.base().params().law()?;
            let fill = law.filler()?;
            let m = to_f64(h.base().params().m());
            let (k, p, kernel) = (h.k(), h.p(), h.kernel());
            let pf: f64 = (1..=p).map(|i| i as f64).product();
            (0..n.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let len = CHUNK.min(n - c * CHUNK);
                    let mut draws = vec![0.0; len];
                    let mut acc = HomogeneousAcc::new(kernel, p, len);
                    for i in 0..k {
                        fill(&mut stream(seed, i as u32, c as u32), &mut draws);
                        acc.push(i, &draws, m);
                    }
                    acc.finish().into_iter().map(|f0| shift + scale * pf * f0).collect()
                })
                .collect()
        }
        ChaosBody::Polynomial(f) => {
            let fills = el
                .generator()
                .coords()
                .iter()
                .map(|g| g.params().law()?.filler())
                .collect::<Result<Vec<_>>>()?;
            let fp = f.to_float();
            let dim = el.dim();
            (0..n.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let len = CHUNK.min(n - c * CHUNK);
                    let mut cols = vec![vec![0.0; len]; dim];
                    for (i, col) in cols.iter_mut().enumerate() {
                        fills[i](&mut stream(seed, i as u32, c as u32), col);
                    }
                    let mut point = vec![0.0; dim];
                    (0..len)
                        .map(|r| {
                            for (i, col) in cols.iter().enumerate() {
                                point[i] = col[r];
                            }
                            shift + scale * fp.eval_unchecked(&point)
                        })
                        .collect()
                })
                .collect()
        }
    };
    Ok(SampleBatch {
        values: chunks.concat(),
        seed,
        provenance: Provenance::ChaosEval { element: el.label().to_string() },
    })
}

/// Running state of `Σ ∏ W` over a chunk of rows, one coordinate at a time.
enum HomogeneousAcc {
    /// Power sums `Σ_i W_i^j`, `j = 1..p`; `e_p` follows from Newton's
    /// identities.
    Complete { power: Vec<Vec<f64>> },
    Blocks { p: usize, sum: Vec<f64>, block: Vec<f64> },
}

impl HomogeneousAcc {
    fn new(kernel: Kernel, p: usize, len: usize) -> Self {
        match kernel {
            Kernel::Complete => HomogeneousAcc::Complete { power: vec![vec![0.0; len]; p] },
            Kernel::Blocks => HomogeneousAcc::Blocks { p, sum: vec![0.0; len], block: vec![1.0; len] },
        }
    }

    fn push(&mut self, i: usize, draws: &[f64], m: f64) {
        match self {
            HomogeneousAcc::Complete { power } => {
                for (r, &x) in draws.iter().enumerate() {
                    let w = x - m;
                    let mut wj = w;
                    for pj in power.iter_mut() {
                        pj[r] += wj;
                        wj *= w;
                    }
                }
            }
            HomogeneousAcc::Blocks { p, sum, block } => {
                let closes = (i + 1).is_multiple_of(*p);
                for (r, &x) in draws.iter().enumerate() {
                    block[r] *= x - m;
                    if closes {
                        sum[r] += block[r];
                        block[r] = 1.0;
                    }
                }
            }
        }
    }

    /// Sum over index sets of `∏ W`, one value per row.
    fn finish(self) -> Vec<f64> {
        match self {
            HomogeneousAcc::Complete { power } => {
                let p = power.len();
                let len = power[0].len();
                let mut e = vec![0.0; p + 1];
                (0..len)
                    .map(|r| {
                        e[0] = 1.0;
                        for j in 1..=p {
                            let mut s = 0.0;
                            for i in 1..=j {
                                let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                                s += sign * e[j - i] * power[i - 1][r];
                            }
                            e[j] = s / j as f64;
                        }
                        e[p]
                    })
                    .collect()
            }
            HomogeneousAcc::Blocks { sum, .. } => sum,
        }
    }
}

/// Target, chaos family and sweep for a convergence run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDescriptor {
    pub target: PearsonParams,
    /// A structured homogeneous sum is resized to each `k`; any other chaos
    /// descriptor is used as is on every row.
    pub chaos: ChaosDescriptor,
    pub k_grid: Vec<usize>,
    pub mc_n: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentDescriptor {
    pub fn from_json(json: &str) -> Result<Self> {
        let d: ExperimentDescriptor = serde_json::from_str(json)?;
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("k_grid must be strictly increasing".into()));
        }
        if self.mc_n < 1000 {
            return Err(Error::InvalidInput(format!("mc_n must be at least 1000, got {}", self.mc_n)));
        }
        Ok(())
    }

    fn element(&self, k: usize) -> Result<ChaosElement> {
        let resizable = self.chaos.homogeneous.as_ref().is_some_and(|h| h.coefficients.is_none());
        if resizable {
            self.chaos.with_k(k)?.build()
        } else {
            self.chaos.build()
        }
    }
}

/// One `k` of a convergence run. `U_value` and `Q2_value` are exact when
/// the moments of `G_k` are available symbolically and Monte Carlo plug-ins
/// otherwise; the `_mc` columns always hold the Monte Carlo estimates.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    #[serde(rename = "U_value")]
    pub u_value: f64,
    #[serde(rename = "Q2_value")]
    pub q2_value: f64,
    #[serde(with = "serde_rational")]
    pub eta_k: Rational,
    #[serde(with = "serde_rational")]
    pub xi_k: Rational,
    pub kolmogorov: f64,
    pub bound: f64,
    #[serde(rename = "U_mc")]
    pub u_mc: f64,
    #[serde(rename = "U_se")]
    pub u_se: f64,
    #[serde(rename = "Q2_mc")]
    pub q2_mc: f64,
    pub exact: bool,
}

pub fn run_convergence(desc: &ExperimentDescriptor) -> Result<Vec<ConvergenceRow>> {
    desc.validate()?;
    let target = TargetSpec::new(desc.target.clone())?;
    let law = desc.target.law()?;
    let (u, q) = (u_poly(&target)?, q_poly(&target)?);
    desc.k_grid.iter().map(|&k| convergence_row(desc, k, &target, &law, &u, &q)).collect()
}

fn convergence_row(
    desc: &ExperimentDescriptor,
    k: usize,
    target: &TargetSpec,
    law: &PearsonLaw,
    u: &Poly,
    q: &Poly,
) -> Result<ConvergenceRow> {
    let el = desc.element(k)?;
    let report = bound(&el, target, BoundOptions { exact_lhs: false, ..BoundOptions::default() });
    let g = chaos_sample(&el, to_f64(target.m()), desc.seed, desc.mc_n)?;
    let mom: Vec<f64> = (1..=4).map(|p| g.raw_moment(p)).collect();
    let (u_mc, u_se) = mean_and_se(g.values.iter().map(|&x| u.eval_f64(x)));
    let (q2_mc, _) = mean_and_se(g.values.iter().map(|&x| q.eval_f64(x).powi(2)));
    let kolmogorov = kolmogorov_distance(&g, law)?;
    let (u_value, q2_value, eta_k, xi_k, bound, exact) = match report {
        Ok(r) => (r.u_int.to_f64(), r.q2_int.to_f64(), r.eta, r.xi, r.bound, true),
        Err(Error::MomentsInsufficient(_)) => {
            let eta = el.grade().clone();
            let gap = &eta - target.eta_tilde();
            let xi = if gap.is_positive() { gap } else { Rational::zero() };
            (u_mc, q2_mc, eta, xi, f64::NAN, false)
        }
        Err(e) => return Err(e),
    };
    Ok(ConvergenceRow {
        k,
        m1: mom[0],
        m2: mom[1],
        m3: mom[2],
        m4: mom[3],
        u_value,
        q2_value,
        eta_k,
        xi_k,
        kolmogorov,
        bound,
        u_mc,
        u_se,
        q2_mc,
        exact,
    })
}

/// CSV with columns `k, m1..m4, U_value, Q2_value, eta_k, xi_k, kolmogorov,
/// bound, U_mc, U_se, Q2_mc, exact`.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
