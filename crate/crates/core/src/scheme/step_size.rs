use super::picard::{iterate, Stepper};
use super::SchemeConfig;
use crate::error::{Error, Result};
use crate::fields::VectorField;
use crate::kernels::SchemeConstants;

/// Spatial dimension entering the foresight step size.
const DIM: f64 = 3.0;

/// `1 / (c_n (C^{l-1} + 1) C_G C_K C_s)`.
pub fn step_size_theorem(c_prev: f64, k: &SchemeConstants) -> Result<f64> {
    if !(c_prev.is_finite() && c_prev >= 0.0) {
        return Err(Error::InvalidArgument(format!("C^(l-1) must be >= 0, got {c_prev}")));
    }
    Ok(1.0 / (k.c_n as f64 * (c_prev + 1.0) * k.c_g * k.c_k * k.c_s))
}

/// Halve `rho0` until the first measured contraction ratio is at most 1/2.
///
/// Each trial runs two sub-iterations. A trial that blows up counts as
/// non-contracting.
pub fn step_size_adaptive(data: &VectorField, cfg: &SchemeConfig, rho0: f64) -> Result<f64> {
    const MAX_HALVINGS: usize = 20;
    data.validate()?;
    if !(rho0.is_finite() && rho0 > 0.0) {
        return Err(Error::InvalidArgument(format!("rho0 must be positive, got {rho0}")));
    }
    let mut rho = rho0;
    let mut ratio = f64::INFINITY;
    for halvings in 0..=MAX_HALVINGS {
        let stepper = Stepper::new(cfg, rho)?;
        match iterate(data, cfg, rho, 1, 2, |prev, _| stepper.substep(prev, data)) {
            Ok(sol) => {
                ratio = sol.ratios.first().copied().unwrap_or(0.0);
                if ratio <= 0.5 {
                    return Ok(rho);
                }
            }
            Err(Error::BlowUp { .. }) => ratio = f64::INFINITY,
            Err(e) => return Err(e),
        }
        if halvings < MAX_HALVINGS {
            rho *= 0.5;
        }
    }
    Err(Error::NoContraction {
        halvings: MAX_HALVINGS,
        ratio,
    })
}

/// `ε / (ν n (C+1) + n (C+1)² + n² C_kp (C+1)²)` with n = 3.
pub fn foresight_step_size(eps: f64, nu: f64, c: f64, c_kp: f64) -> Result<f64> {
    for (name, x) in [("eps", eps), ("nu", nu), ("C", c), ("c_kp", c_kp)] {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")));
        }
    }
    let c1 = c + 1.0;
    Ok(eps / (nu * DIM * c1 + DIM * c1 * c1 + DIM * DIM * c_kp * c1 * c1))
}
