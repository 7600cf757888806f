//! Default tolerance hierarchy.
//!
//! Three tiers are used throughout the crate; every public operation that
//! compares against one of them also accepts an explicit override.

/// Algebraic identities that hold exactly up to rounding (reconstruction,
/// orthonormality, round trips).
pub const ALGEBRAIC: f64 = 1e-10;

/// Limits of iterative procedures (Cesàro limits, Dykstra membership,
/// idempotency of computed projections).
pub const LIMIT: f64 = 1e-8;

/// Reported subspace agreement (envelope ranges across seeds).
pub const REPORT: f64 = 1e-6;

/// Singular values of an idempotent's superoperator above this count
/// towards its rank.
pub const RANK: f64 = 1e-7;

/// Relative threshold for the kernel of `T - I` when extracting fixed points.
pub const KERNEL: f64 = 1e-9;
