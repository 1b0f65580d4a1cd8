//! Primal-dual interior-point solver for semidefinite programs over complex
//! Hermitian blocks, plus a compiler from affine matrix-inequality programs.

pub mod affine;
pub mod embed;
pub mod error;
pub mod kkt;
pub mod linalg;
pub mod problem;
pub mod solver;
pub mod sparse;

pub use affine::{AffineProgram, AffineSolution, CompiledProgram};
pub use embed::{real_embedding, real_embedding_inverse};
pub use error::{Result, SdpError};
pub use kkt::{verify_kkt, KktReport};
pub use problem::{Constraint, SdpProblem, Sense};
pub use solver::{solve, solve_default, Certificate, IterationLog, SdpSolution, SolverOptions, Status};
pub use sparse::SparseHerm;
