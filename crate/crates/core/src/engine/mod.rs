//! Solvers for the reduced and the full equation: explicit Euler, Picard
//! iteration, interlacing of large jumps, and truncation with explosion
//! detection.

mod euler;
mod local;
mod path;
mod picard;
mod problem;

pub use euler::{interlace_solve, solve_reduced_euler};
pub use local::{aitken, solve_local, truncate_coeffs, Truncated};
pub use path::{ExplosionInfo, LargeJumpRecord, PathRecord, PathState};
pub use picard::{picard_solve, PicardTrace, DEFAULT_PICARD_MAX_ITER, DEFAULT_PICARD_TOL};
pub use problem::{localize_kappa, localize_xi, CoefficientSource, SolveProblem};
