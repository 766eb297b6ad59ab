//! Reference computations used only by tests.
//!
//! Nothing here calls into the crates under test: every function takes plain
//! scalars or matrices so that it stays an independent check.

pub mod exponential;
pub mod glm;
pub mod linalg;
pub mod search;
