//! BDF/EXT algebraic splitting time integrator with optional semi-Lagrangian
//! subcycling of the advection stage.

mod coefficients;
mod lserk;
mod stepper;

pub use coefficients::{
    lagrange_weights, pressure_extrapolation, scheme_coefficients, SchemeCoefficients,
};
pub use lserk::lserk_step;
pub use stepper::{
    advect_extrapolate, subcycle_advect, subcycle_dt, transport, FlowState, StepConfig, StepStats,
    Stepper, SubcycleConfig,
};
