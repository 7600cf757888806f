//! Idempotents in finite semigroups and injective envelopes of matrix
//! operator systems.

// Negated comparisons such as `!(x <= tol)` are deliberate: they treat NaN as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod channel;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod feasible_set;
pub mod matrix;
pub mod semigroup;
pub mod tolerance;

pub use error::{Error, Result};
