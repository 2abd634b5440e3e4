//! Simulation and analysis of quantum phase estimation when only
//! limited-precision controlled phase shifts are available.
//!
//! Four estimators share one fixed-point [`phase::Phase`] type:
//!
//! * [`kitaev`]: sine/cosine Hadamard-test batteries, snapping and stitching;
//! * [`fourier`]: the semiclassical inverse QFT with a bounded correction
//!   window, covering full QFT, AQFT and the constant-precision estimator;
//! * [`reference`]: the exact outcome distribution used as an oracle;
//! * [`bounds`]: Chernoff trial budgets and success lower bounds.
//!
//! The eigenvector register is never simulated: controlled powers of `U` act on
//! it by their eigenvalue, so every Hadamard test reduces to a phase on one
//! ancilla.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimate;
pub mod fourier;
pub mod kitaev;
pub mod phase;
pub mod reference;
pub mod sampling;

pub use error::{Error, Result};
pub use estimate::{is_success, EstimationResult};
pub use phase::{BitString, Phase, TestBasis};
pub use sampling::{RngSeed, SimRng, TrialStats};
