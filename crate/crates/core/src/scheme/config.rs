use serde::{Deserialize, Serialize};

use crate::control::ControlMode;
use crate::error::{Error, Result};
use crate::fields::GridSpec;

/// How ρ_l is chosen at each time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepPolicy {
    /// `1 / (c_n (C^{l-1} + 1) C_G C_K C_s)`, recomputed every step.
    Theorem,
    Fixed { rho: f64 },
    /// Halve from `rho0` until the first measured ratio is ≤ 1/2.
    Adaptive { rho0: f64 },
    /// ε-coupled size `ε / (ν n (C+1) + n (C+1)² + n² C_kp (C+1)²)` of the
    /// foresight control; needs `ControlMode::Foresight`.
    Foresight { c_kp: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub nu: f64,
    /// Sobolev order of all contraction and growth norms.
    pub m: u32,
    /// Optional floor for `C^{l-1}`; the squared H^m norm of the current
    /// data is used when larger.
    pub c_bound: Option<f64>,
    pub c_n: u32,
    pub max_subiter: usize,
    /// Stop once the trajectory H^m norm of δv is ≤ `tol · (1 + ‖data‖_{H^m})`.
    pub tol: f64,
    /// Number of local time intervals M (M + 1 nodes).
    pub nodes: usize,
    pub step_policy: StepPolicy,
    pub control: ControlMode,
    pub dealias: bool,
    pub grid: GridSpec,
}

impl SchemeConfig {
    pub fn new(grid: GridSpec) -> Self {
        SchemeConfig {
            nu: 1.0,
            m: 2,
            c_bound: None,
            c_n: 16,
            max_subiter: 40,
            tol: 1e-9,
            nodes: 16,
            step_policy: StepPolicy::Theorem,
            control: ControlMode::None,
            dealias: true,
            grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return fail(format!("nu must be positive, got {}", self.nu));
        }
        if !(2..=4).contains(&self.m) {
            return fail(format!("m must be in 2..=4, got {}", self.m));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return fail(format!("tol must be positive, got {}", self.tol));
        }
        if self.nodes < 2 {
            return fail(format!("nodes (M) must be >= 2, got {}", self.nodes));
        }
        if self.max_subiter < 2 {
            return fail(format!("max_subiter must be >= 2, got {}", self.max_subiter));
        }
        if self.c_n < 1 {
            return fail("c_n must be >= 1".into());
        }
        if let Some(c) = self.c_bound {
            if !(c.is_finite() && c >= 0.0) {
                return fail(format!("c_bound must be >= 0, got {c}"));
            }
        }
        match self.step_policy {
            StepPolicy::Fixed { rho } | StepPolicy::Adaptive { rho0: rho } if !(rho.is_finite() && rho > 0.0) => {
                return fail(format!("step policy needs rho > 0, got {rho}"));
            }
            StepPolicy::Foresight { c_kp } => {
                if !(c_kp.is_finite() && c_kp > 0.0) {
                    return fail(format!("c_kp must be positive, got {c_kp}"));
                }
                if !matches!(self.control, ControlMode::Foresight { .. }) {
                    return fail("the foresight step policy needs control mode foresight".into());
                }
            }
            _ => {}
        }
        self.control.validate()
    }
}
