//! Small dense complex semidefinite programming.
//!
//! Block PSD programs with traced linear constraints are solved natively
//! on the complex Hermitian cone by a primal-dual interior-point method;
//! a deterministic rank-reduction procedure and two randomization
//! primitives recover rank-1 solutions. Instances are independent and
//! may be solved in parallel; randomized operations take an explicit RNG
//! handle.

mod error;
mod problem;
mod randomization;
mod rank_reduction;
mod solver;

pub use error::SdpError;
pub use problem::{Constraint, SdpProblem, Sense};
pub use randomization::{randomize_gaussian_rank1, rank1_preserving_vector};
pub use rank_reduction::{numerical_rank, rank_reduce};
pub use solver::{solve_sdp, solve_sdp_with, IterateRecord, SdpSolution, SdpStatus, SolverOptions};
