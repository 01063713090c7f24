//! Class groups of quadratic orders, the Latimer-MacDuffee matrix-similarity
//! correspondence, exact Minkowski question-mark arithmetic, and order
//! predictions for Tate-Shafarevich groups of CM elliptic curves, with an
//! LMFDB comparison client.

pub mod arith;
pub mod error;
pub mod latmac;
pub mod lmfdb;
pub mod minkowski;
pub mod orders;
pub mod qforms;
pub mod sha;

pub use error::{Error, Result};
