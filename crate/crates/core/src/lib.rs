//! Binary learning differential evolution (BLDE) and its experiment toolkit.
//!
//! The crate bundles the optimizer, the benchmark problems it is measured on,
//! the renewal/refinement diagnostics, multi-run statistics and a hybrid
//! binary/real solver for the unit commitment problem.
//!
//! Independent runs are spread across a rayon pool when the `parallel`
//! feature is enabled (the default); without it every batch runs
//! sequentially with identical results.

pub mod batch;
pub mod benchmarks;
pub mod bits;
pub mod blde;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod mkp;
pub mod population;
pub mod problem;
pub mod random_search;
pub mod rng;
pub mod stats;
pub mod ucp;

pub use bits::{hamming, BitString};
pub use blde::{blde_run, Blde, BldeConfig};
pub use error::{Error, Result};
pub use problem::{Optimizer, Problem, RunResult};
pub use rng::RngStream;
