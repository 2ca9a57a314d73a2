//! Pareto front identification in multi-objective Gaussian bandits.
//!
//! The core of the crate is an exact solver for the smallest weighted
//! transportation cost from a bandit model to any model with a different
//! Pareto set ([`oracle::min_alt_cost`]). It drives a Track-and-Stop learner
//! ([`learner`]) that samples arms until a generalized likelihood ratio test
//! certifies the Pareto set at a prescribed risk.

pub mod add;
pub mod cells;
pub mod datasets;
pub mod error;
pub mod learner;
pub mod model;
pub mod oracle;
#[cfg(feature = "reference")]
pub mod reference;
pub mod remove;

pub use error::{Error, Result};
pub use model::{dominates, pareto_set, BanditInstance, Matrix, ParetoSet, Weights};
pub use oracle::{min_alt_cost, Strategy, TransportResult, Witness};
