//! Generalized Chernoff-Hoeffding bound for bounded real-valued variables
//! under a product-moment condition, the sampling process that proves it,
//! and a randomized detector for dependent subsets.
//!
//! * [`entropy`]: binary relative entropy, normalization, λ optimization and
//!   the bound itself.
//! * [`models`]: joint laws with sampling and an exact engine.
//! * [`mc`]: the bit/subset process, Monte Carlo estimates and the exact
//!   inequality chain.
//! * [`witness`]: the two-phase dependent-subset search.
//! * [`cli`]: the command-line front end.

pub mod cli;
pub mod entropy;
pub mod error;
pub mod mc;
pub mod models;
pub mod sampling;
pub mod witness;

pub use entropy::{chernoff_bound, evaluate_bound, kl_div, normalize, BoundParams, NormalizedParams};
pub use error::{Error, Result};
pub use models::{JointModel, Marginal};
