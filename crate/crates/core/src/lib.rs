//! Saddle-avoiding modified Newton methods with backtracking line search.
//!
//! The step direction is built from the eigendecomposition of a regularized
//! Hessian `A = ∇²f(x) + δ‖∇f(x)‖^{1+α} Id`: components of `A⁻¹∇f` along
//! negative-curvature eigenvectors are sign-flipped, which always yields a
//! descent direction. A backtracking search on that direction then gives the
//! descent property while keeping Newton's local quadratic rate.
//!
//! Modules:
//! - [`spectral`]: symmetric eigendecomposition, δ selection, the step direction.
//! - [`calculus`]: the [`Objective`] trait and finite-difference derivatives.
//! - [`optimizers`]: the method variants, baselines, run loop and diagnostics.
//! - [`problems`]: benchmark objectives with their reference initial points.
//! - [`harness`]: experiment registry, report writers and property checks.
//!
//! ```
//! use qnbt_core::optimizers::{run, Algorithm, OptimizerConfig};
//! use qnbt_core::problems::beale;
//!
//! let cfg = OptimizerConfig::new(Algorithm::V1, 2);
//! let report = run(&beale(), &[-0.52012358, -1.28227229], &cfg);
//! assert!(report.final_record().f < 1e-12);
//! ```

pub mod calculus;
mod error;
pub mod harness;
pub mod optimizers;
pub mod problems;
pub mod spectral;

pub use calculus::{FnObjective, Objective};
pub use error::{Error, Result};
pub use optimizers::{
    run, Algorithm, GdConfig, IterationRecord, OptimizerConfig, RunReport, Termination,
};
pub use spectral::{DeltaSchedule, SpectralData, SymmetricMatrix};
