//! Feasible reward sets for tabular finite-horizon inverse reinforcement
//! learning: exact dynamic programming, reward polytopes and their Hausdorff
//! distances, the uniform-sampling estimator with its confidence radii and
//! sample-complexity bounds, and generators for the standard hard instances.

pub mod analysis;
pub mod concentration;
pub mod error;
pub mod experiments;
pub mod hausdorff;
pub mod instances;
pub mod lp;
pub mod mdp;
pub mod polytope;
pub mod sampling;
pub mod usirl;
pub mod vertex;

pub use error::{IrlError, Result};
