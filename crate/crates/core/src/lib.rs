//! Exact symplectic-invariant calculus for the mapping class group.

pub mod budget;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod rational;

pub use budget::Budget;
pub use error::{Error, Result};
pub use rational::Rational;
pub mod space;
pub mod symplectic;
pub mod tensor;
pub mod chord;
pub mod lie;
pub mod subspace;
pub mod formal;
pub mod derivation;
pub mod invariants;
pub mod sp;
pub mod homology;
pub mod graphs;
pub mod checks;
