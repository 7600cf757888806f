//! Convex sets of completely positive maps cut out by affine conditions on
//! the Choi matrix, with projection, sampling and linear optimization.

mod cb;
mod optimize;
mod set;
mod space;

pub use cb::{cb_norm, CbNorm};
pub use optimize::{choi_functional, superop_functional, LinearMax, DEFAULT_STARTS, PROJECTION_BUDGET, PROJECTION_TOL};
pub use set::{build_system_set, Constraint, FeasibleSet, Membership};
pub use space::{OperatorSpaceJson, OperatorSubspace, SpaceMode, MAX_AMBIENT};
