//! Adelic heights on the projective line over ℚ: exact finite-place energy
//! pairings, archimedean potential theory, Berkovich trees, and canonical
//! heights of rational maps.

pub mod arith;
pub mod berkovich;
pub mod complex;
pub mod dynamics;
pub mod error;
pub mod heights;

pub use error::{Error, Result};

/// Crate version, recorded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
