//! Batch front end: run configuration, presets and subcommands.

mod commands;
mod config;
pub mod presets;

pub use commands::{
    cmd_checkpoint_roundtrip, cmd_compare_schemes, cmd_constants, cmd_contraction, cmd_run, initial_field, summarize,
    Exit, SCHEME_AGREEMENT_TOL,
};
pub use config::{ControlSection, GridSection, RunConfig, RunSection, SchemeSection};
pub use presets::{abc_flow, gaussian_vortex, perturbed, preset_field, taylor_green, Preset};
