//! The linearized model, its branch-and-bound solver, an exhaustive oracle
//! for tiny instances, and MPS export.

mod bnb;
mod brute;
mod milp;
mod mps;

pub use bnb::{solve, solve_with_incumbent, SolveLimits, SolveReport, SolveStatus};
pub use brute::{brute_force, lattice_estimate, BruteForceError, BruteForceGuard};
pub use milp::{build_milp, MilpConstraint, MilpModel, MilpVar, Relation, VarKind, VarLayout};
pub use mps::export_mps;
