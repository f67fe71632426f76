//! Small dense interior-point solver for block-diagonal semidefinite programs,
//! with SDPA sparse-format import and export.
//!
//! Problems are stated in SDPA convention (see [`problem`]). The solver
//! returns both objective values; the dual value `F_0 • Y` is a rigorous
//! lower bound on the primal optimum whenever the returned `Y` is feasible.

pub mod error;
pub mod numfmt;
pub mod problem;
pub mod sdpa;
pub mod solver;

pub use error::SdpError;
pub use problem::{BlockKind, Entry, SdpProblem, SymSparse};
pub use sdpa::{export_sdpa, import_sdpa};
pub use solver::{solve, BlockValue, Certificate, SdpSolution, SolveStatus, SolverOptions};
