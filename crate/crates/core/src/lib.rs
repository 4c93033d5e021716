//! Linear self-attention (LSA) model of compositional in-context learning.
//!
//! The crate is organised bottom-up:
//!
//! - [`gaussian`]: Gaussian task model. Task spaces with disjoint active
//!   index sets, block covariances, task weights, prompts and the
//!   `(d+K) x (N+1)` prompt embedding.
//! - [`lsa`]: the one-layer LSA network, the refactored population loss,
//!   its closed-form global and rank-constrained minimisers, and a gradient
//!   descent cross-check.
//! - [`lab`]: sign accuracy, the compositional-ability predicate and the
//!   Monte Carlo experiments (confined support, overlapping support, rank
//!   scaling, alignment, the four-object case study).
//!
//! Everything random is driven by [`rng::Seed`], a counter-based stream so
//! any trial can be replayed on its own.

pub mod error;
pub mod fixture;
pub mod gaussian;
pub mod lab;
pub mod linalg;
pub mod lsa;
pub mod rng;

pub use error::{Error, Result};
pub use rng::Seed;
