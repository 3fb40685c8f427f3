//! Tensorized Pearson generators `L_N = Σ_i L_i` on product measures, and
//! chaos elements living in a single eigenspace of `L_N`.

mod descriptor;
mod element;
mod homogeneous;

pub use descriptor::{read_chaos, ChaosDescriptor, CoefficientSpec, HomogeneousSpec, TermSpec};
pub use element::{tensor_chaos_grade, tensor_eigenfunction, weighted_grade, ChaosBody, ChaosElement};
pub use homogeneous::{homogeneous_structured, homogeneous_sum, CoefficientTensor, HomogeneousSum, Kernel, MATERIALIZE_LIMIT};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::generator::{admits_degree, expand_in_basis, Generator};
use crate::polycalc::{MPoly, MultiIndex, Poly};
use crate::rational::{int, Rational};

/// Generator of `N` independent Pearson coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorGenerator {
    coords: Vec<Generator>,
}

impl TensorGenerator {
    pub fn new(coords: Vec<Generator>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("a tensor generator needs at least one coordinate".into()));
        }
        Ok(TensorGenerator { coords })
    }

    /// `n` i.i.d. copies of `base`.
    pub fn iid(base: Generator, n: usize) -> Result<Self> {
        Self::new(vec![base; n])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Generator] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Generator {
        &self.coords[i]
    }

    /// Multiplies every coordinate's `θ` by `factor`.
    pub fn rescaled(&self, factor: &Rational) -> Result<Self> {
        let coords = self
            .coords
            .iter()
            .map(|g| g.clone().with_theta(g.theta() * factor))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }

    fn check(&self, f: &MPoly) -> Result<()> {
        if f.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: f.dim() });
        }
        Ok(())
    }

    pub fn apply_ln(&self, f: &MPoly) -> Result<MPoly> {
        self.check(f)?;
        let mut out = MPoly::zero(self.dim());
        for (i, g) in self.coords.iter().enumerate() {
            if f.degree_in(i) == 0 {
                continue;
            }
            let li = f.map_coordinate(i, |k| g.apply_l(&Poly::monomial(Rational::one(), k as usize)));
            out = &out + &li;
        }
        Ok(out)
    }

    /// `Γ_N(f, g) = Σ_i θ_i b_i(x_i) ∂_i f ∂_i g`.
    pub fn gamma_n(&self, f: &MPoly, g: &MPoly) -> Result<MPoly> {
        self.check(f)?;
        self.check(g)?;
        let mut out = MPoly::zero(self.dim());
        for (i, gen) in self.coords.iter().enumerate() {
            let (fi, gi) = (f.partial(i), g.partial(i));
            if fi.is_zero() || gi.is_zero() {
                continue;
            }
            let b = MPoly::from_poly(self.dim(), i, &gen.params().b_poly().scale(gen.theta()));
            out = &out + &(&b * &(&fi * &gi));
        }
        debug_assert!(f.num_terms() * g.num_terms() > 400 || out == self.gamma_n_by_definition(f, g)?);
        Ok(out)
    }

    /// `½(L_N(fg) - f L_N g - g L_N f)`.
    pub fn gamma_n_by_definition(&self, f: &MPoly, g: &MPoly) -> Result<MPoly> {
        let lfg = self.apply_ln(&f.checked_mul(g)?)?;
        let rest = &(f * &self.apply_ln(g)?) + &(g * &self.apply_ln(f)?);
        Ok((&lfg - &rest).scale(&Rational::new(1.into(), 2.into())))
    }

    /// Exact moment tables `m^{(i)}_0..m^{(i)}_{deg_i}` for the degrees used by `f`.
    fn moment_tables(&self, degrees: &[u32]) -> Result<Vec<Vec<Rational>>> {
        self.coords.iter().zip(degrees).map(|(g, &d)| g.params().moments(d as usize)).collect()
    }

    fn degrees(&self, f: &MPoly) -> Vec<u32> {
        (0..self.dim()).map(|i| f.degree_in(i)).collect()
    }

    /// `∫ f dμ_N` with the product measure.
    pub fn integrate_n(&self, f: &MPoly) -> Result<Rational> {
        self.check(f)?;
        let tables = self.moment_tables(&self.degrees(f))?;
        Ok(f.terms().fold(Rational::zero(), |acc, (e, c)| acc + c * monomial_moment(&tables, e)))
    }

    /// `∫ f g dμ_N` without forming the product polynomial.
    pub fn integrate_product(&self, f: &MPoly, g: &MPoly) -> Result<Rational> {
        self.check(f)?;
        self.check(g)?;
        let degs: Vec<u32> = (0..self.dim()).map(|i| f.degree_in(i) + g.degree_in(i)).collect();
        let tables = self.moment_tables(&degs)?;
        let gt: Vec<(&MultiIndex, &Rational)> = g.terms().collect();
        let mut acc = Rational::zero();
        let mut e = vec![0u32; self.dim()];
        for (ef, cf) in f.terms() {
            let mut inner = Rational::zero();
            for (eg, cg) in &gt {
                for i in 0..e.len() {
                    e[i] = ef[i] + eg[i];
                }
                let mo = monomial_moment(&tables, &e);
                if !mo.is_zero() {
                    inner += *cg * &mo;
                }
            }
            acc += cf * inner;
        }
        Ok(acc)
    }

    /// `λ_α = Σ_i λ^{(i)}_{α_i}`.
    pub fn lambda_of(&self, alpha: &[u32]) -> Rational {
        self.coords
            .iter()
            .zip(alpha)
            .fold(Rational::zero(), |acc, (g, &a)| acc + g.lambda(a as usize))
    }

    /// `P_α = Π_i P^{(i)}_{α_i}(x_i)`.
    pub fn eigenfunction(&self, alpha: &[u32]) -> Result<MPoly> {
        if alpha.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: alpha.len() });
        }
        let mut out = MPoly::one(self.dim());
        for (i, (g, &a)) in self.coords.iter().zip(alpha).enumerate() {
            if a > 0 {
                out = &out * &MPoly::from_poly(self.dim(), i, &g.eigenpoly(a as usize)?);
            }
        }
        Ok(out)
    }

    /// Rewrites `f` in the product eigenbasis: in the result, the exponent
    /// vector `α` stands for `P_α`.
    pub fn to_eigen_coords(&self, f: &MPoly) -> Result<MPoly> {
        self.check(f)?;
        let mut out = f.clone();
        for (i, g) in self.coords.iter().enumerate() {
            let d = f.degree_in(i) as usize;
            if d == 0 {
                continue;
            }
            let basis = (0..=d).map(|k| g.eigenpoly(k)).collect::<Result<Vec<_>>>()?;
            out = out.map_coordinate(i, |k| {
                Poly::from_coeffs(expand_in_basis(&Poly::monomial(Rational::one(), k as usize), &basis))
            });
        }
        Ok(out)
    }

    /// Inverse of [`to_eigen_coords`](Self::to_eigen_coords).
    pub fn from_eigen_coords(&self, f: &MPoly) -> Result<MPoly> {
        self.check(f)?;
        let mut out = f.clone();
        for (i, g) in self.coords.iter().enumerate() {
            if f.degree_in(i) == 0 {
                continue;
            }
            let mut err = None;
            out = out.map_coordinate(i, |k| match g.eigenpoly(k as usize) {
                Ok(p) => p,
                Err(e) => {
                    err = Some(e);
                    Poly::zero()
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        Ok(out)
    }

    /// `L_N⁻¹ f` on the product eigen-span.
    pub fn l_inverse_n(&self, f: &MPoly) -> Result<MPoly> {
        self.check(f)?;
        for (i, g) in self.coords.iter().enumerate() {
            let d = f.degree_in(i) as usize;
            if !admits_degree(g.params().b2(), d) {
                return Err(Error::OutsideDomain(format!(
                    "coordinate {} has degree {d} beyond its square-integrable eigenfunctions",
                    i + 1
                )));
            }
        }
        let e = self.to_eigen_coords(f)?;
        let mut scaled = MPoly::zero(self.dim());
        for (alpha, c) in e.terms() {
            if alpha.iter().all(|&a| a == 0) {
                continue;
            }
            scaled.add_term(alpha.clone(), -(c / self.lambda_of(alpha)));
        }
        self.from_eigen_coords(&scaled)
    }

    /// Largest `λ_α` among the nonzero components of `f` in the eigenbasis.
    pub fn top_eigenvalue(&self, f: &MPoly) -> Result<Rational> {
        let e = self.to_eigen_coords(f)?;
        Ok(e.terms().map(|(a, _)| self.lambda_of(a)).max().unwrap_or_else(Rational::zero))
    }
}

fn monomial_moment(tables: &[Vec<Rational>], e: &[u32]) -> Rational {
    let mut out = Rational::one();
    for (t, &k) in tables.iter().zip(e) {
        if k > 0 {
            let m = &t[k as usize];
            if m.is_zero() {
                return Rational::zero();
            }
            out *= m;
        }
    }
    out
}

/// `(x - c)` embedded in coordinate `i`.
pub(crate) fn centered_var(dim: usize, i: usize, c: &Rational) -> MPoly {
    &MPoly::var(dim, i) - &MPoly::constant(dim, c.clone())
}

pub(crate) fn ri(n: usize) -> Rational {
    int(n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pearson::PearsonParams;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn gauss() -> Generator {
        Generator::new(PearsonParams::gaussian(int(0), int(1)).unwrap())
    }

    fn mixed() -> TensorGenerator {
        TensorGenerator::new(vec![
            gauss(),
            Generator::new(PearsonParams::beta(int(2), int(3)).unwrap()).with_theta(rat(1, 2)).unwrap(),
            Generator::new(PearsonParams::student_t(int(30)).unwrap()),
        ])
        .unwrap()
    }

    fn x(dim: usize, i: usize) -> MPoly {
        MPoly::var(dim, i)
    }

    #[test]
    fn ln_examples() {
        let t = TensorGenerator::iid(gauss(), 2).unwrap();
        let f = &x(2, 0) * &x(2, 1);
        assert_eq!(t.apply_ln(&f).unwrap(), f.scale(&int(-2)));
        assert!(t.apply_ln(&MPoly::constant(2, int(4))).unwrap().is_zero());
        let m = mixed();
        let alpha = vec![1, 2, 1];
        let p = m.eigenfunction(&alpha).unwrap();
        assert_eq!(m.apply_ln(&p).unwrap(), p.scale(&-m.lambda_of(&alpha)));
        assert!(t.apply_ln(&MPoly::var(3, 0)).is_err());
    }

    #[test]
    fn gamma_examples() {
        let t = TensorGenerator::iid(gauss(), 2).unwrap();
        assert_eq!(t.gamma_n(&x(2, 0), &x(2, 0)).unwrap(), MPoly::one(2));
        assert!(t.gamma_n(&(&x(2, 0) * &x(2, 0)), &x(2, 1)).unwrap().is_zero());
        let m = mixed();
        let s = &(&x(3, 0) + &x(3, 1)) + &x(3, 2);
        let expect = m.coords().iter().enumerate().fold(MPoly::zero(3), |acc, (i, g)| {
            &acc + &MPoly::from_poly(3, i, &g.params().b_poly().scale(g.theta()))
        });
        assert_eq!(m.gamma_n(&s, &s).unwrap(), expect);
    }

    #[test]
    fn l_inverse_examples() {
        let t = TensorGenerator::iid(gauss(), 2).unwrap();
        assert!(t.l_inverse_n(&MPoly::constant(2, int(3))).unwrap().is_zero());
        let f = &x(2, 0) * &x(2, 1);
        assert_eq!(t.l_inverse_n(&f).unwrap(), f.scale(&rat(-1, 2)));
        let m = mixed();
        let p = m.eigenfunction(&[2, 1, 0]).unwrap();
        assert_eq!(m.l_inverse_n(&p).unwrap(), p.scale(&-m.lambda_of(&[2, 1, 0]).recip()));
    }

    #[test]
    fn integrate_examples() {
        let t = TensorGenerator::iid(gauss(), 2).unwrap();
        assert_eq!(t.integrate_n(&MPoly::one(2)).unwrap(), int(1));
        let f = &(&x(2, 0) * &x(2, 0)) * &(&x(2, 1) * &x(2, 1));
        assert_eq!(t.integrate_n(&f).unwrap(), int(1));
        let s = TensorGenerator::new(vec![gauss(), Generator::new(PearsonParams::student_t(int(9)).unwrap())]).unwrap();
        let f = MPoly::var(2, 1).pow(4);
        assert_eq!(s.integrate_n(&f).unwrap(), PearsonParams::student_t(int(9)).unwrap().moments(4).unwrap()[4]);
        let heavy = TensorGenerator::new(vec![Generator::new(PearsonParams::student_t(int(3)).unwrap())]).unwrap();
        assert!(heavy.integrate_n(&MPoly::var(1, 0).pow(3)).is_err());
    }

    #[test]
    fn eigen_coords_round_trip() {
        let m = mixed();
        let f = &(&x(3, 0).pow(2) * &x(3, 1)) + &x(3, 2).pow(3).scale(&rat(2, 3));
        let e = m.to_eigen_coords(&f).unwrap();
        assert_eq!(m.from_eigen_coords(&e).unwrap(), f);
    }

    fn arb_mpoly() -> impl Strategy<Value = MPoly> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -4i64..5, 1i64..4), 0..5).prop_map(|v| {
            MPoly::from_terms(3, v.into_iter().map(|((a, b, c), n, d)| (vec![a, b, c], rat(n, d)))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn integration_by_parts(f in arb_mpoly(), g in arb_mpoly()) {
            let m = mixed();
            let a = m.integrate_n(&(&g * &m.apply_ln(&f).unwrap())).unwrap();
            let b = m.integrate_n(&m.gamma_n(&f, &g).unwrap()).unwrap();
            prop_assert!((a + b).is_zero());
            prop_assert_eq!(m.integrate_product(&f, &g).unwrap(), m.integrate_n(&(&f * &g)).unwrap());
        }

        #[test]
        fn diffusion_property(f in arb_mpoly(), g in arb_mpoly(), phi in prop::collection::vec(-3i64..4, 0..4)) {
            let m = mixed();
            let phi = Poly::from_ints(&phi);
            let lhs = m.gamma_n(&phi.compose_mpoly(&f), &g).unwrap();
            let rhs = &phi.derivative().compose_mpoly(&f) * &m.gamma_n(&f, &g).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn l_inverse_inverts(f in arb_mpoly()) {
            let m = mixed();
            let u = m.l_inverse_n(&f).unwrap();
            let mean = m.integrate_n(&f).unwrap();
            prop_assert_eq!(m.apply_ln(&u).unwrap(), &f - &MPoly::constant(3, mean));
            prop_assert!(m.integrate_n(&u).unwrap().is_zero());
        }

        #[test]
        fn gamma_two_ways(f in arb_mpoly(), g in arb_mpoly()) {
            let m = mixed();
            prop_assert_eq!(m.gamma_n(&f, &g).unwrap(), m.gamma_n_by_definition(&f, &g).unwrap());
        }
    }
}
