//! The New Q-Newton family, its baselines, and the iteration driver.
//!
//! Every New Q-Newton variant is the same step parameterised by three
//! switches, see [`Variant`]:
//!
//! | algorithm | δ rule      | capped ŵ | line search  |
//! |-----------|-------------|----------|--------------|
//! | NQN       | determinant | no       | none         |
//! | NQN_B     | minsp       | yes      | Armijo       |
//! | NQN_B_S   | minsp       | no       | Armijo       |
//! | V1        | determinant | yes      | weak descent |
//! | V2        | determinant | yes      | Armijo       |
//! | V3        | determinant | no       | weak descent |
//! | V4        | determinant | no       | Armijo       |
//!
//! Classical Newton and Unbounded Two-way Backtracking gradient descent are
//! provided for comparison.

mod config;
mod diagnostics;
mod line_search;
mod run;
mod steps;

pub use config::{Algorithm, GdConfig, LineSearchRule, OptimizerConfig, Variant};
pub use diagnostics::{convergence_order, is_nonincreasing, projective_distance};
pub use line_search::{armijo_search, weak_descent_search, LineSearchOutcome};
pub use run::{run, run_with, IterationRecord, RunReport, Termination};
pub use steps::{newton_step, nqn_family_step, utb_gd_step, StepOutcome};
