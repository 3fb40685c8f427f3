use serde::{Deserialize, Serialize};

use super::element::{tensor_eigenfunction, ChaosElement};
use super::homogeneous::{homogeneous_structured, homogeneous_sum, CoefficientTensor, Kernel};
use super::TensorGenerator;
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::pearson::PearsonParams;
use crate::rational::{serde_rational, Rational};

/// JSON description of a chaos element.
///
/// Either `terms` (multi-indices with coefficients over `n` copies of
/// `base`, or over the explicit `coords`) or `homogeneous` must be given.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChaosDescriptor {
    pub base: PearsonParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<PearsonParams>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homogeneous: Option<HomogeneousSpec>,
    #[serde(default)]
    pub normalize: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub alpha: Vec<u32>,
    #[serde(with = "serde_rational")]
    pub coeff: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogeneousSpec {
    pub k: usize,
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Kernel>,
    /// Sparse coefficients, symmetrized on ingestion. Exclusive with `kernel`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<CoefficientSpec>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub index: Vec<usize>,
    #[serde(with = "serde_rational")]
    pub coeff: Rational,
}

impl ChaosDescriptor {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The same descriptor with `k` replaced, for sweeps over sum length.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        let mut out = self.clone();
        match &mut out.homogeneous {
            Some(h) if h.coefficients.is_none() => h.k = k,
            _ => return Err(Error::InvalidInput("only structured homogeneous sums can be resized".into())),
        }
        Ok(out)
    }

    pub fn build(&self) -> Result<ChaosElement> {
        let base = Generator::new(self.base.clone());
        let el = match (&self.terms, &self.homogeneous) {
            (Some(terms), None) => {
                let gen = match (&self.coords, self.n) {
                    (Some(c), _) => TensorGenerator::new(c.iter().cloned().map(Generator::new).collect())?,
                    (None, Some(n)) => TensorGenerator::iid(base, n)?,
                    (None, None) => {
                        let n = terms.first().map_or(1, |t| t.alpha.len());
                        TensorGenerator::iid(base, n)?
                    }
                };
                let terms: Vec<_> = terms.iter().map(|t| (t.alpha.clone(), t.coeff.clone())).collect();
                let el = tensor_eigenfunction(&gen, &terms)?;
                if self.normalize {
                    el.normalized()?
                } else {
                    el
                }
            }
            (None, Some(h)) => match (&h.kernel, &h.coefficients) {
                (Some(kernel), None) => homogeneous_structured(&base, h.k, h.p, *kernel, self.normalize)?,
                (None, Some(c)) => {
                    let a = CoefficientTensor::symmetrized(h.p, c.iter().map(|e| (e.index.clone(), e.coeff.clone())))?;
                    homogeneous_sum(&base, h.k, &a, self.normalize)?
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "a homogeneous sum needs exactly one of kernel and coefficients".into(),
                    ))
                }
            },
            _ => return Err(Error::InvalidInput("give exactly one of terms and homogeneous".into())),
        };
        Ok(match &self.label {
            Some(l) => el.with_label(l.clone()),
            None => el,
        })
    }
}

/// Parses and builds a chaos element.
pub fn read_chaos(json: &str) -> Result<ChaosElement> {
    ChaosDescriptor::from_json(json)?.build()
}
