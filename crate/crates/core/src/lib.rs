//! Dynamic cloudlet placement and selection.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the domain types and the cost/feasibility oracle.
//! * [`scenario`] generates seeded instances and reads/writes scenario files.
//! * [`exact`] builds the linearized MILP, solves it by branch-and-bound and
//!   exports it as MPS; a brute-force enumerator checks it on tiny instances.
//! * [`heuristic`] implements the two greedy multi-period strategies.
//! * [`harness`] runs the experiment sweeps and emits CSV and SVG output.

pub mod exact;
pub mod harness;
pub mod heuristic;
pub mod model;
pub mod money;
pub mod scenario;

pub use money::Money;
