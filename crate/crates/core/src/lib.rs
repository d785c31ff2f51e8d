//! Noncommutative rational functions: parsing, state-space realizations and
//! the Fock-space analysis built on them.

pub mod cli;
pub mod error;
pub mod factorization;
pub mod fock;
pub mod linalg;
pub mod ncexpr;
pub mod realization;
pub mod spectral;
pub mod spectrum;
pub mod tuple;

pub use error::{Error, Result};
