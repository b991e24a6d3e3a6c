//! Discrepancy minimization for random hypergraphs.
//!
//! The crate covers the random models (t-regular and Bernoulli), exact and
//! baseline colorings, a constrained random-walk partial coloring, the
//! two-stage coloring pipeline built on it, restricted spectral norms of the
//! incidence matrix, exact second-moment computations for the Bernoulli
//! model, and a seeded experiment harness.

pub mod discrepancy;
pub mod enumerate;
pub mod error;
pub mod h2_moments;
pub mod harness;
pub mod hypergraph;
mod linalg;
mod projector;
pub mod partial_coloring;
pub mod rng;
pub mod spectral;
pub mod two_stage;

pub use discrepancy::{Coloring, DiscReport};
pub use error::{Error, Result};
pub use hypergraph::Hypergraph;
pub use rng::RandomSource;
