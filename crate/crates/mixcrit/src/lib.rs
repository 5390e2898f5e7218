//! Maximum-likelihood analysis of two-component univariate Gaussian
//! mixtures, focused on finding, certifying, and counting critical points of
//! the log-likelihood.
//!
//! The pieces:
//!
//! - [`mixture`]: the five-parameter model, its density, log-likelihood,
//!   gradient and responsibilities (all in log space), label-switching
//!   canonicalization, classification, and the exponent-spectrum probe.
//! - [`em`]: the fixed-point EM iteration with monotonicity-aware traces and
//!   an equal-variance variant.
//! - [`census`]: multi-start search with canonical deduplication and
//!   extended-precision Newton certification of every reported point.
//! - [`hills`]: the clustered-sample construction in which the number of
//!   non-trivial critical points grows with the number of clusters, with its
//!   per-iteration invariant-box audit.
//! - [`toy`]: the two-parameter constrained model whose critical equation is
//!   transcendental, solved to arbitrary decimal precision.
//!
//! The `examples/` directory has one runnable example per capability, and
//! the `mixcrit` binary exposes the same operations as subcommands.

pub mod census;
pub mod cli;
pub mod em;
pub mod error;
pub mod hills;
pub mod ingest;
pub mod mixture;
mod mp;
pub mod toy;

pub use census::{census, CensusOptions, CensusReport, CriticalPoint, StartStrategy};
pub use em::{run_em, Constraint, EMOptions, EMStatus, EMTrace};
pub use error::{Error, Result};
pub use hills::{box_bounds, generate_sample, run_manyhills, starting_point, BoxBounds, HillsRow};
pub use mixture::{
    canonicalize, classify, density, exponent_spectrum, grad_loglik, loglik, responsibilities,
    Classification, MixtureParams, Sample,
};
pub use toy::{
    critical_residual, interior_threshold, recover_alpha, solve_mu, surface_grid, toy_loglik,
    unboundedness_trace, ToyProblem, ToySolveResult,
};
