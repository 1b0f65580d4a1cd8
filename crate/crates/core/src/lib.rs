//! Certified bounds on convex-roof entanglement measures from symmetric
//! multi-copy semidefinite relaxations.

pub mod data;
pub mod error;
pub mod fisher;
pub mod oracles;
pub mod roof;
pub mod steering;
pub mod symmetric;
pub mod tensor;
pub mod witness;

pub use error::{Result, RoofError};
