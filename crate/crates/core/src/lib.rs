//! Divergences on the quotient of Hermitian operators by unitary
//! equivalence, their closed forms on sorted spectra, and the dissipative
//! speed limits of normalized non-Hermitian dynamics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod divergence;
pub mod dynamics;
pub mod error;
pub mod residual;
pub mod spectral;
pub mod verify;

pub use channels::{
    apply_cptp, apply_stochastic, kraus_from_stochastic, KrausSet, StochasticMatrix,
};
pub use divergence::DivergenceKind;
pub use dynamics::{integrate, NonHermitianGenerator, Scenario, Trajectory};
pub use error::{Error, Result};
pub use residual::{minimize_over_unitaries, Minimization};
pub use spectral::{
    DensityOperator, EigenDecomposition, HermitianOperator, SortedSpectrum, UnitaryOperator,
};
pub use verify::{run_suite, Suite, SuiteConfig, SuiteReport};
