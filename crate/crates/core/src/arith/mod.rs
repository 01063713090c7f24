//! Exact arithmetic foundation: integer utilities and the Kronecker symbol,
//! quadratic irrationals with decidable equality, continued fractions, and
//! fundamental units of real quadratic orders.

pub mod cf;
pub mod ints;
pub mod pell;
pub mod quad;

pub use cf::{cf_expand, ContinuedFraction};
pub use ints::kronecker;
pub use pell::{fundamental_pell, PellSolution};
pub use quad::{ExactReal, QuadIrrational};
