//! Finite abstract polytopes with a prescribed automorphism group.

pub mod autgroup;
pub mod complex;
pub mod diagrams;
pub mod error;
pub mod fixtures;
pub mod forge;
pub mod hull;
pub mod lattice;
pub mod permgroup;
pub mod realize;

pub use error::{Error, Result};
