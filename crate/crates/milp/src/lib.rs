//! Self-contained linear and mixed-binary linear programming.
//!
//! Problems are described with [`MilpProblem`]. Linear relaxations are solved
//! by a bounded-variable dual simplex over a sparse LU-factored basis
//! ([`solve_lp`], [`LpEngine`]); binary variables are handled by best-bound
//! branch-and-bound with warm starts ([`solve_milp`]).

mod bnb;
mod error;
mod lu;
mod problem;
mod simplex;

pub use bnb::{check_uniqueness, solve_milp, BnbConfig, Branching, MilpSolution, MilpStatus, Uniqueness};
pub use error::MilpError;
pub use problem::{Constraint, MilpProblem, Sense, VarKind, Variable};
pub use simplex::{lp_audit, solve_lp, Basis, LpEngine, LpSolution, LpStatus, LpTolerances, VarStatus};

/// Largest accepted gap between primal and dual objective at an optimal LP solution.
pub const DUALITY_GAP_TOL: f64 = 1e-6;
