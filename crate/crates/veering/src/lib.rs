//! Veering triangulations of half-translation surfaces, their flip dynamics, and a
//! suspension-flow model of the Teichmueller flow built from them.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod flips;
pub mod flow;
pub mod geometry;
pub mod triangulation;

pub use error::{Error, Result};
