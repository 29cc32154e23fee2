//! Mutually unbiased bases as points of `U(n) / C_n`: the MUBness metric,
//! monomial stabilizers, orbits and equivalence of MUB lists.

pub mod basis;
pub mod dim4;
pub mod equivalence;
mod error;
pub mod linalg;
pub mod monomial;
pub mod stabilizer;

pub use error::{MubError, Result};
