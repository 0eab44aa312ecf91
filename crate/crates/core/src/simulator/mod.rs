//! Finite-difference evolution of `u_t = u_xx + f(u)` and the diagnostics
//! used to observe convergence to the traveling wave.

mod comparison;
mod envelope;
mod grid;
mod observe;

pub use comparison::{
    comparison_check, heat_kernel_eps, reaction_ode, ComparisonReport, OdeBranch,
};
pub use envelope::{envelope_value, select_m, supersub_params, EnvelopeSign, SuperSubParams};
pub use grid::{dt_stability, step, Boundary, Grid1D, SimState, Stepper, DIVERGENCE_BOUNDS};
pub use observe::{
    estimate_speed, fit_decay, front_position, run, shift_distance, DecayFit, FrontPosition,
    RunOptions, SpeedFit, Trajectory,
};
