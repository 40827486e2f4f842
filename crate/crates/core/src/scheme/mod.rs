//! Picard sub-iteration, step-size selection and the global time loop.

mod config;
mod global;
pub(crate) mod picard;
mod step_size;

pub use config::{SchemeConfig, StepPolicy};
pub use global::{run_global, run_global_with, RunLedger, StepOutcome, StepReport, DIVERGENCE_TOL};
pub use picard::{
    local_solve, local_solve_at, local_solve_nonstar, nonstar_substep, picard_substep, LocalSolution,
    SolveStatus,
};
pub use step_size::{foresight_step_size, step_size_adaptive, step_size_theorem};
