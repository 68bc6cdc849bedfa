//! Contextuality measures for finite systems of dichotomous measurements.
//!
//! The crate models content–context systems of 0/1 random variables,
//! builds the linear programs behind four contextuality measures (CNT₁,
//! hierarchical CNT₂ᵐ, CNT₃, and the contextual fraction CNTF), solves
//! them with a floating-point simplex or an exact rational oracle, and
//! runs parameter sweeps over cyclic and hypercyclic system families.

pub mod error;
pub mod generators;
pub mod harness;
pub mod lp;
pub mod measures;
pub mod solver;
pub mod system;

pub use error::{Error, Result};
pub use system::{ContextSpec, System};
