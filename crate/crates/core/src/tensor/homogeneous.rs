use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::element::{ChaosBody, ChaosElement};
use super::{centered_var, ri, TensorGenerator};
use crate::error::{Error, Result};
use crate::generator::{admits_degree, Generator};
use crate::pearson::transform_moments;
use crate::polycalc::MPoly;
use crate::rational::{binomial, factorial, fmt_rational, Rational};

/// Largest number of index sets expanded into an explicit polynomial.
pub const MATERIALIZE_LIMIT: usize = 200;

/// Which index sets carry weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// Every `p`-subset of `{1..k}` with weight one.
    Complete,
    /// The disjoint blocks `{1..p}, {p+1..2p}, …`.
    Blocks,
}

/// `F0 = Σ_{distinct j_1..j_p} a_{j} W_{j_1}⋯W_{j_p}` with `W = x - m` over
/// `k` i.i.d. copies of `base`, for a structured kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousSum {
    base: Generator,
    k: usize,
    p: usize,
    kernel: Kernel,
}

impl HomogeneousSum {
    pub fn new(base: Generator, k: usize, p: usize, kernel: Kernel) -> Result<Self> {
        if p == 0 || p > k {
            return Err(Error::InvalidInput(format!("need 1 <= p <= k, got p = {p}, k = {k}")));
        }
        if kernel == Kernel::Blocks && !k.is_multiple_of(p) {
            return Err(Error::InvalidInput(format!("blocks of size {p} do not tile {k} coordinates")));
        }
        if !admits_degree(base.params().b2(), 2) {
            return Err(Error::NotChaotic("first-chaos coordinates need b2 < 1/3".into()));
        }
        Ok(HomogeneousSum { base, k, p, kernel })
    }

    pub fn base(&self) -> &Generator {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn block_count(&self) -> usize {
        self.k / self.p
    }

    pub(crate) fn rescaled(&self, factor: &Rational) -> Result<Self> {
        let base = self.base.clone().with_theta(self.base.theta() * factor)?;
        Ok(HomogeneousSum { base, ..self.clone() })
    }

    /// Number of index sets with nonzero weight.
    pub fn index_sets(&self) -> Rational {
        match self.kernel {
            Kernel::Complete => binomial(self.k, self.p),
            Kernel::Blocks => ri(self.block_count()),
        }
    }

    pub fn is_materializable(&self) -> bool {
        self.index_sets() <= ri(MATERIALIZE_LIMIT)
    }

    /// `p λ_1`.
    pub fn lambda(&self) -> Rational {
        ri(self.p) * self.base.lambda(1)
    }

    /// Maximizes `s λ_2 + 2(p - s) λ_1` over the achievable overlaps `s` of
    /// two index sets.
    pub fn grade(&self) -> Rational {
        let (l1, l2) = (self.base.lambda(1), self.base.lambda(2));
        let p = self.p;
        let overlaps: Vec<usize> = match self.kernel {
            Kernel::Complete => ((2 * p).saturating_sub(self.k)..=p).collect(),
            Kernel::Blocks if self.block_count() >= 2 => vec![0, p],
            Kernel::Blocks => vec![p],
        };
        let top = overlaps
            .into_iter()
            .map(|s| ri(s) * &l2 + ri(2 * (p - s)) * &l1)
            .max()
            .unwrap_or_else(Rational::zero);
        top / (ri(p) * l1)
    }

    /// Central moments `μ_0..μ_r` of the base law.
    fn central_moments(&self, r: usize) -> Result<Vec<Rational>> {
        let raw = self.base.params().moments(r)?;
        Ok(transform_moments(&raw, &Rational::one(), &-self.base.params().m().clone()))
    }

    /// `E[F0^r]` for `r = 0..=rmax`.
    pub fn raw_moments(&self, rmax: usize) -> Result<Vec<Rational>> {
        let mu = self.central_moments(rmax.max(2))?;
        let mut out = vec![Rational::one()];
        for r in 1..=rmax {
            out.push(match self.kernel {
                Kernel::Complete => complete_moment(self.k, self.p, r, &mu),
                Kernel::Blocks => blocks_moment(self.block_count(), self.p, r, &mu)?,
            });
        }
        Ok(out)
    }

    /// `Var F0`.
    pub fn variance(&self) -> Result<Rational> {
        Ok(self.raw_moments(2)?.swap_remove(2))
    }

    /// `F0` as an explicit polynomial over `k` coordinates.
    pub fn materialize(&self) -> Result<MPoly> {
        if !self.is_materializable() {
            return Err(Error::InvalidInput(format!(
                "{} index sets exceed the expansion limit of {MATERIALIZE_LIMIT}",
                fmt_rational(&self.index_sets())
            )));
        }
        let m = self.base.params().m().clone();
        let w: Vec<MPoly> = (0..self.k).map(|i| centered_var(self.k, i, &m)).collect();
        let mut out = MPoly::zero(self.k);
        let mut add_set = |set: &[usize]| {
            let prod = set.iter().fold(MPoly::one(self.k), |acc, &i| &acc * &w[i]);
            out = &out + &prod;
        };
        match self.kernel {
            Kernel::Complete => for_each_subset(self.k, self.p, &mut add_set),
            Kernel::Blocks => {
                for b in 0..self.block_count() {
                    let set: Vec<usize> = (b * self.p..(b + 1) * self.p).collect();
                    add_set(&set);
                }
            }
        }
        Ok(out.scale(&factorial(self.p)))
    }
}

fn for_each_subset(k: usize, p: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, k: usize, p: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == p {
            f(cur);
            return;
        }
        for i in start..=k - (p - cur.len()) {
            cur.push(i);
            rec(i + 1, k, p, cur, f);
            cur.pop();
        }
    }
    rec(0, k, p, &mut Vec::with_capacity(p), f);
}

fn falling(k: usize, n: usize) -> Rational {
    if n > k {
        return Rational::zero();
    }
    (0..n).fold(Rational::one(), |acc, i| acc * ri(k - i))
}

/// `E[F0^r]` for the complete kernel.
///
/// Positions `(t, q)` of the `r` tuples are grouped by coordinate value. A
/// group is described by the set `S ⊆ {1..r}` of tuples it touches; each
/// tuple touches exactly `p` groups and every group has `|S| >= 2` since
/// `μ_1 = 0`. With multiplicities `n_S` the count of position partitions is
/// `(p!)^r / Π n_S!`, and the groups take `(k)_{Σ n_S}` distinct values.
fn complete_moment(k: usize, p: usize, r: usize, mu: &[Rational]) -> Rational {
    let subsets: Vec<u32> = (1u32..(1 << r)).filter(|s| s.count_ones() >= 2).collect();
    let pf = factorial(p);
    let lead = (0..r).fold(Rational::one(), |acc, _| acc * &pf);
    let mut total = Rational::zero();
    let mut counts = vec![0usize; subsets.len()];
    let mut remaining = vec![p; r];
    rec_complete(0, &subsets, &mut counts, &mut remaining, &mut |counts| {
        let groups: usize = counts.iter().sum();
        let mut w = &lead * falling(k, groups);
        if w.is_zero() {
            return;
        }
        for (s, &n) in subsets.iter().zip(counts.iter()) {
            if n == 0 {
                continue;
            }
            w /= factorial(n);
            for _ in 0..n {
                w *= &mu[s.count_ones() as usize];
            }
        }
        total += w;
    });
    total
}

fn rec_complete(
    idx: usize,
    subsets: &[u32],
    counts: &mut [usize],
    remaining: &mut [usize],
    f: &mut impl FnMut(&[usize]),
) {
    if idx == subsets.len() {
        if remaining.iter().all(|&c| c == 0) {
            f(counts);
        }
        return;
    }
    let s = subsets[idx];
    let members: Vec<usize> = (0..remaining.len()).filter(|t| s & (1 << t) != 0).collect();
    let cap = members.iter().map(|&t| remaining[t]).min().unwrap_or(0);
    for n in 0..=cap {
        for &t in &members {
            remaining[t] -= n;
        }
        counts[idx] = n;
        rec_complete(idx + 1, subsets, counts, remaining, f);
        for &t in &members {
            remaining[t] += n;
        }
    }
    counts[idx] = 0;
}

/// `E[F0^r]` for disjoint blocks: `F0 = p!·S`, `S = Σ_b Π_{j∈b} W_j`.
fn blocks_moment(nb: usize, p: usize, r: usize, mu: &[Rational]) -> Result<Rational> {
    let pw = |x: &Rational, e: usize| (0..e).fold(Rational::one(), |acc, _| acc * x);
    let nbr = ri(nb);
    let s = match r {
        1 => Rational::zero(),
        2 => &nbr * pw(&mu[2], p),
        3 => &nbr * pw(&mu[3], p),
        4 => &nbr * pw(&mu[4], p) + ri(3) * &nbr * (&nbr - Rational::one()) * pw(&mu[2], 2 * p),
        _ => {
            return Err(Error::InvalidInput(format!(
                "block-kernel moments are implemented up to order 4, got {r}"
            )))
        }
    };
    Ok(pw(&factorial(p), r) * s)
}

/// Symmetric coefficient tensor of order `p`, zero on the diagonals, stored
/// as one value per strictly increasing index set.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTensor {
    p: usize,
    entries: BTreeMap<Vec<usize>, Rational>,
}

impl CoefficientTensor {
    /// Requires every entry to be off-diagonal and every permutation of an
    /// index tuple to carry the same value. Missing permutations count as 0.
    pub fn from_entries(p: usize, entries: impl IntoIterator<Item = (Vec<usize>, Rational)>) -> Result<Self> {
        let mut seen: BTreeMap<Vec<usize>, BTreeMap<Vec<usize>, Rational>> = BTreeMap::new();
        for (idx, v) in entries {
            let key = Self::canonical(p, &idx)?;
            seen.entry(key).or_default().insert(idx, v);
        }
        let pf = factorial(p);
        let mut out = BTreeMap::new();
        for (key, perms) in seen {
            let first = perms.values().next().cloned().unwrap_or_else(Rational::zero);
            let all_equal = perms.values().all(|v| *v == first);
            if !all_equal || (ri(perms.len()) != pf && !first.is_zero()) {
                return Err(Error::InvalidCoefficients(format!("entries for {key:?} are not symmetric")));
            }
            if !first.is_zero() {
                out.insert(key, first);
            }
        }
        Ok(CoefficientTensor { p, entries: out })
    }

    /// Symmetrizes `a` by averaging over the permutations of each tuple.
    pub fn symmetrized(p: usize, entries: impl IntoIterator<Item = (Vec<usize>, Rational)>) -> Result<Self> {
        let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        let pf = factorial(p);
        for (idx, v) in entries {
            let key = Self::canonical(p, &idx)?;
            *out.entry(key).or_insert_with(Rational::zero) += v / &pf;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(CoefficientTensor { p, entries: out })
    }

    /// All `p`-subsets of `{0..k-1}` with value `c`.
    pub fn complete(k: usize, p: usize, c: Rational) -> Self {
        let mut entries = BTreeMap::new();
        for_each_subset(k, p, &mut |s| {
            entries.insert(s.to_vec(), c.clone());
        });
        CoefficientTensor { p, entries }
    }

    fn canonical(p: usize, idx: &[usize]) -> Result<Vec<usize>> {
        if idx.len() != p {
            return Err(Error::InvalidCoefficients(format!("index {idx:?} does not have order {p}")));
        }
        let mut key = idx.to_vec();
        key.sort_unstable();
        if key.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidCoefficients(format!("diagonal index {idx:?}")));
        }
        Ok(key)
    }

    pub fn order(&self) -> usize {
        self.p
    }

    /// `(sorted index set, a)` pairs.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.entries.iter()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().filter_map(|k| k.last().copied()).max()
    }
}

/// `F = Σ a_{j_1…j_p} W_{j_1}⋯W_{j_p}` over `k` i.i.d. copies of `base`,
/// expanded explicitly. Optionally rescaled to unit variance.
pub fn homogeneous_sum(base: &Generator, k: usize, a: &CoefficientTensor, normalize: bool) -> Result<ChaosElement> {
    let p = a.order();
    if p == 0 || p > k {
        return Err(Error::InvalidInput(format!("need 1 <= p <= k, got p = {p}, k = {k}")));
    }
    if a.max_index().is_some_and(|i| i >= k) {
        return Err(Error::InvalidCoefficients(format!("indices must be below k = {k}")));
    }
    let gen = TensorGenerator::iid(base.clone(), k)?;
    let m = base.params().m().clone();
    let w: Vec<MPoly> = (0..k).map(|i| centered_var(k, i, &m)).collect();
    let mut f = MPoly::zero(k);
    for (set, c) in a.entries() {
        let prod = set.iter().fold(MPoly::one(k), |acc, &i| &acc * &w[i]);
        f = &f + &prod.scale(c);
    }
    let f = f.scale(&factorial(p));
    let el = ChaosElement::from_poly(&gen, f)?.with_label(format!("homogeneous sum k={k} p={p}"));
    if normalize {
        el.normalized()
    } else {
        Ok(el)
    }
}

/// Homogeneous sum with a structured kernel, kept symbolic.
pub fn homogeneous_structured(
    base: &Generator,
    k: usize,
    p: usize,
    kernel: Kernel,
    normalize: bool,
) -> Result<ChaosElement> {
    let h = HomogeneousSum::new(base.clone(), k, p, kernel)?;
    let gen = TensorGenerator::iid(base.clone(), k)?;
    let label = format!("homogeneous {} sum k={k} p={p}", match kernel {
        Kernel::Complete => "complete",
        Kernel::Blocks => "block",
    });
    let (lambda, grade) = (h.lambda(), h.grade());
    let el = ChaosElement::from_parts(gen, ChaosBody::Homogeneous(h), lambda, grade, label);
    if normalize {
        el.normalized()
    } else {
        Ok(el)
    }
}
