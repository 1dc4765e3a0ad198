//! Relatedness logic: Epstein models, their classical translation, S-sets,
//! Hilbert-style checking, interpolation and witness constructions.

pub mod cli;
pub mod error;
pub mod interpolation;
pub mod proofsys;
pub mod random;
pub mod semantics;
pub mod sset;
pub mod syntax;
pub mod translation;
pub mod witnesses;

pub use error::{Error, Result};
