//! Sandwiched Rényi conditional entropies and their uniform continuity bounds.
//!
//! Layers, bottom to top: [`operator`] (Hermitian/PSD matrices, spectral functions,
//! partial traces), [`state`] (density operators, samplers, perturbations, JSON files),
//! [`entropy`] (divergences and conditional entropies with cross-validated solvers),
//! [`bounds`] (closed-form continuity bounds) and [`harness`] (randomized campaigns).

pub mod bounds;
pub mod channel;
pub mod distance;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod operator;
pub mod optimize;
pub mod purification;
pub mod state;

pub use error::{Error, Result};
