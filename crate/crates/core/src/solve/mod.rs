//! Estimators: lasso, Dantzig selector, basis pursuit and the
//! least-squares oracle on a known support.

mod estimators;
pub mod lp;

pub use estimators::{
    basis_pursuit, dantzig, lasso, lasso_with, ols_on_support, soft_threshold, DantzigSolution, LassoOptions,
    LassoSolution,
};
pub use lp::{lp_solve, LinearProgram, LpOutcome, LpSolution};
