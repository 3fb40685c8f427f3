//! Pearson diffusions, Markov generator calculus on polynomials, chaos
//! grades and quantitative four-moment bounds, with Monte Carlo tooling to
//! check them.

pub mod batch;
pub mod error;
pub mod fourmoments;
pub mod generator;
pub mod montecarlo;
pub mod pearson;
pub mod polycalc;
pub mod quad;
pub mod rational;
pub mod rng;
pub mod spectral;
pub mod stein;
pub mod tensor;

pub use batch::{Provenance, SampleBatch};
pub use error::{Error, Result};
pub use pearson::{Classification, MomentOrder, PearsonClass, PearsonLaw, PearsonParams, Support};
pub use polycalc::{MPoly, Poly, SurdPoly};
pub use rational::{Rational, Surd};
pub use tensor::{ChaosElement, TensorGenerator};
pub use montecarlo::{ConvergenceRow, ExperimentDescriptor, SdeOptions};
pub use stein::DensityTarget;
