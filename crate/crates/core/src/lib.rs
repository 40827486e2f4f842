//! Heat-kernel Picard time stepping for the 3D incompressible Navier–Stokes
//! equation in Leray form, with control functions and diagnostics.

pub mod cli;
pub mod control;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod kernels;
mod quadrature;
pub mod scheme;

pub use error::{Error, Result};
