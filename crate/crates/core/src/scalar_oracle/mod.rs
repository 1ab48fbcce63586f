//! Closed-form oracles for scalar ODE problems with an L¹ tracking term.
//!
//! [`example1`] covers `y' = y + eᵗ u`, `y(0) = -1`, whose optimal control
//! is known pointwise. [`general`] covers `y' = f y + g u` with a terminal
//! condition, where the optimal control is a clipped affine combination of
//! `g/F` and `g H/F` with a multiplier fixed by a moment equation.

mod coefficient;
pub mod example1;
pub mod general;

pub use coefficient::Coefficient;
pub use example1::{
    example1_control, example1_moment_check, example1_objective, example1_state, solve_t0, Example1Params,
};
pub use general::{
    gamma_threshold, general_solution, ScalarDynamics, ScalarOracleSolution, ScalarProblem, ThresholdReport,
    KERNEL_INTERVALS,
};
