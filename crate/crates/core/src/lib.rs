//! Simulation and diagnostics for bivariate heavy-tailed data.
//!
//! The crate generates samples with prescribed multivariate regular variation
//! (MRV) on the punctured quadrant and hidden regular variation (HRV) on the
//! open quadrant, and detects that structure from data using rank transforms,
//! generalized polar coordinates, Hill-type estimators and the Hillish /
//! Pickandsish diagnostics for conditional extreme value (CEV) models.
//!
//! Layout:
//! - [`sampling`]: scalar laws, the seeded RNG contract, shared newtypes.
//! - [`generators`]: bivariate constructions (radial-angular, hidden, mixture, additive).
//! - [`transforms`]: GPOLAR coordinates, rank transforms, concomitant tables.
//! - [`diagnostics`]: estimator kernels and the detection report.
//! - [`pipeline`]: run configuration, CSV/JSON I/O, canned experiments, CLI.

pub mod diagnostics;
pub mod error;
pub mod generators;
pub mod pipeline;
pub mod sampling;
pub mod transforms;

pub use error::{HrvError, Result};
pub use generators::{GeneratorSpec, SampleBatch};
pub use sampling::{Probability, RngStream, ScalarLaw, TailIndex};

/// Tool version stamped into every metadata document.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
