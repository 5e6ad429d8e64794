//! Cameo random graphs with independent edges.
//!
//! Vertices carry i.i.d. weights `ω_i` drawn from a density `φ` on `[1, ∞)`.
//! With `y_i = φ(ω_i)^{-α}` and `S = Σ y_k`, the pair `{i, j}` is an edge
//! independently with probability `min{(c/S)(y_i + y_j), 1}`.
//!
//! The crate is split into:
//!
//! * [`weights`]: weight densities, sampling and the moment integrals built on them.
//! * [`graphgen`]: graph generation (exact sweep and envelope skip-sampling).
//! * [`analytic`]: path-count combinatorics and threshold predictions.
//! * [`pathconn`]: simple-path counts, distances and essential-diameter bounds.
//! * [`harness`]: seeded Monte Carlo experiments comparing the two sides.

pub mod analytic;
pub mod error;
pub mod graphgen;
pub mod harness;
pub mod pathconn;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod weights;

pub use error::{CameoError, Result};
