//! Exponential time stepping with exact treatment of the stiff linear parts.

pub mod phi;
pub mod propagator;
pub mod stepper;

pub use phi::{phi_functions, phi_matrix, phi_scalar, Mat2};
pub use propagator::{build_propagator, ModePropagator, PropagatorCache};
pub use stepper::{
    choose_dt, plan_steps, run_em, run_linear, run_mhd, step_em, step_linear, step_mhd,
    EmIntegrator, FlowState, LinIntegrator, MhdIntegrator, Scheme, StepperConfig,
};
