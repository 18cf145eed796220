//! Weight sequences, their associated weight functions, N-functions built from
//! them, complementary and dual constructions, and finite-horizon checkers for
//! the standard growth conditions.
//!
//! All sequences live on a finite horizon `1..=J`. Quantities that depend on
//! the tail are reported as evidence with a [`Verdict`] rather than as proofs.

pub mod associated;
pub mod conjugation;
pub mod dual;
pub mod error;
pub mod evidence;
pub mod expr;
pub mod growth;
pub mod n_to_sequence;
pub mod nfunction;
pub mod piecewise;
pub mod weight_sequences;

pub use error::{Error, Result};
pub use evidence::Verdict;
pub use weight_sequences::{Family, SequenceSpec, WeightSequence};
