//! Control functions `r^l` added once per time step to the velocity.
//!
//! Every increment is a [`LocalTrajectory`] over the step's nodes that is
//! exactly zero at the first node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{cm_sup_norm, sobolev_norm, LocalTrajectory, ScalarField, VectorField};
use crate::kernels::HeatParams;
use crate::scheme::picard::Stepper;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ControlMode {
    #[default]
    None,
    /// `δr = G ⋆ (-v/C)` over the step.
    Simple { c: f64 },
    /// `δr = -δv^1`, the negated first Picard increment.
    NegFirstIncrement,
    /// Negated first increment plus `G ⋆ (-v/C - r/C²)`.
    Consumption { c: f64 },
    /// Sign-partition control built from the solution at the step's end.
    Foresight { c: f64, eps: f64 },
}

impl ControlMode {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("control {name} must be positive, got {x}")))
            }
        };
        match *self {
            ControlMode::None | ControlMode::NegFirstIncrement => Ok(()),
            ControlMode::Simple { c } | ControlMode::Consumption { c } => positive("C", c),
            ControlMode::Foresight { c, eps } => {
                positive("C", c)?;
                positive("eps", eps)
            }
        }
    }

    /// The scale `C`, for modes that have one.
    pub fn scale(&self) -> Option<f64> {
        match *self {
            ControlMode::Simple { c } | ControlMode::Consumption { c } | ControlMode::Foresight { c, .. } => Some(c),
            ControlMode::None | ControlMode::NegFirstIncrement => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ControlMode::None => "none",
            ControlMode::Simple { .. } => "simple",
            ControlMode::NegFirstIncrement => "neg_first_increment",
            ControlMode::Consumption { .. } => "consumption",
            ControlMode::Foresight { .. } => "foresight",
        }
    }
}

/// Current control `r^l(l, ·)` and the norms it had after each step.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlState {
    r: VectorField,
    history: Vec<f64>,
}

impl ControlState {
    pub fn new(r: VectorField) -> Result<Self> {
        r.validate()?;
        Ok(ControlState { r, history: Vec::new() })
    }

    pub fn r(&self) -> &VectorField {
        &self.r
    }

    /// `max(‖r‖_{H^m}, ‖r‖_{C^m})` after each completed step.
    pub fn history(&self) -> &[f64] {
        &self.history
    }
}

/// `r = h / C` for modes with a scale, zero otherwise.
pub fn init_control(h: &VectorField, mode: ControlMode) -> Result<ControlState> {
    mode.validate()?;
    h.validate()?;
    let r = match mode.scale() {
        Some(c) => h.zip_with(h, move |a, _| a / c)?,
        None => VectorField::zeros(*h.grid()),
    };
    ControlState::new(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignClass {
    VPlusRPlus,
    VPlusRMinus,
    VMinusRPlus,
    VMinusRMinus,
    /// `v = 0`
    Zero,
}

impl SignClass {
    pub const ALL: [SignClass; 5] = [
        SignClass::VPlusRPlus,
        SignClass::VPlusRMinus,
        SignClass::VMinusRPlus,
        SignClass::VMinusRMinus,
        SignClass::Zero,
    ];

    pub fn is_equal_sign(self) -> bool {
        matches!(self, SignClass::VPlusRPlus | SignClass::VMinusRMinus)
    }
}

/// One label per grid point; the classes are disjoint and cover the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SignPartition {
    labels: Vec<SignClass>,
}

impl SignPartition {
    pub fn labels(&self) -> &[SignClass] {
        &self.labels
    }

    pub fn indices(&self, class: SignClass) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == class).collect()
    }

    pub fn count(&self, class: SignClass) -> usize {
        self.labels.iter().filter(|&&c| c == class).count()
    }
}

/// Classify grid points by the signs of `v_fore` and `r_prev`.
///
/// Points where `r_prev` is exactly zero join the equal-sign class of `v_fore`.
pub fn sign_partition(v_fore: &ScalarField, r_prev: &ScalarField) -> Result<SignPartition> {
    if v_fore.grid() != r_prev.grid() {
        return Err(Error::InvalidArgument("sign partition of fields on different grids".into()));
    }
    v_fore.validate()?;
    r_prev.validate()?;
    let labels = v_fore
        .values()
        .iter()
        .zip(r_prev.values())
        .map(|(&v, &r)| {
            if v == 0.0 {
                SignClass::Zero
            } else if v > 0.0 {
                if r >= 0.0 {
                    SignClass::VPlusRPlus
                } else {
                    SignClass::VPlusRMinus
                }
            } else if r <= 0.0 {
                SignClass::VMinusRMinus
            } else {
                SignClass::VMinusRPlus
            }
        })
        .collect();
    Ok(SignPartition { labels })
}

/// Componentwise [`sign_partition`].
pub fn sign_partition_vector(v_fore: &VectorField, r_prev: &VectorField) -> Result<[SignPartition; 3]> {
    Ok([
        sign_partition(v_fore.component(0), r_prev.component(0))?,
        sign_partition(v_fore.component(1), r_prev.component(1))?,
        sign_partition(v_fore.component(2), r_prev.component(2))?,
    ])
}

fn check_scale(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("control scale C must be positive, got {c}")))
    }
}

fn constant_source(src: &VectorField, p: &HeatParams, step: usize, intervals: usize) -> Result<LocalTrajectory> {
    Stepper::with_params(*src.grid(), p, intervals, false)?.constant_source_duhamel(src, step)
}

/// `δr(τ_j) = ∫_{l-1}^{τ_j} G(τ_j - s) ⋆ (-v_prev / C) ds`.
pub fn control_simple(
    v_prev: &VectorField,
    c: f64,
    p: &HeatParams,
    step: usize,
    intervals: usize,
) -> Result<LocalTrajectory> {
    check_scale(c)?;
    v_prev.validate()?;
    let src = v_prev.zip_with(v_prev, move |v, _| -v / c)?;
    constant_source(&src, p, step, intervals)
}

/// `δr(τ_j) = -(v^1(τ_j) - data)`.
pub fn control_neg_first_increment(traj_k1: &LocalTrajectory, data: &VectorField) -> Result<LocalTrajectory> {
    if traj_k1.first() != data {
        return Err(Error::InvalidArgument("first sub-iterate does not start at the data".into()));
    }
    let states = traj_k1
        .states()
        .iter()
        .map(|s| data.sub(s))
        .collect::<Result<Vec<_>>>()?;
    LocalTrajectory::new(traj_k1.step(), states)
}

/// Negated first increment plus the consumption source `-v_prev/C - r_prev/C²`.
pub fn control_consumption(
    v_prev: &VectorField,
    r_prev: &VectorField,
    c: f64,
    p: &HeatParams,
    traj_k1: &LocalTrajectory,
    data: &VectorField,
) -> Result<LocalTrajectory> {
    check_scale(c)?;
    v_prev.validate()?;
    r_prev.validate()?;
    let c2 = c * c;
    let src = v_prev.zip_with(r_prev, move |v, r| -v / c - r / c2)?;
    let neg = control_neg_first_increment(traj_k1, data)?;
    let phi = constant_source(&src, p, traj_k1.step(), traj_k1.intervals())?;
    neg.add(&phi)
}

/// Periodic 26-neighbour dilation of a point set.
fn dilate(set: &[bool], n: usize) -> Vec<bool> {
    let mut out = set.to_vec();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !set[(i * n + j) * n + k] {
                    continue;
                }
                for di in [n - 1, 0, 1] {
                    for dj in [n - 1, 0, 1] {
                        for dk in [n - 1, 0, 1] {
                            out[(((i + di) % n) * n + (j + dj) % n) * n + (k + dk) % n] = true;
                        }
                    }
                }
            }
        }
    }
    out
}

/// The foresight function `g` for one component.
fn foresight_source(v: &ScalarField, r: &ScalarField, c: f64) -> Result<ScalarField> {
    let part = sign_partition(v, r)?;
    let equal: Vec<bool> = part.labels().iter().map(|l| l.is_equal_sign()).collect();
    let closure = dilate(&equal, v.grid().n());
    let c2 = c * c;
    let values = part
        .labels()
        .iter()
        .zip(&closure)
        .zip(v.values().iter().zip(r.values()))
        .map(|((&label, &near_equal), (&v, &r))| match label {
            SignClass::Zero => r / c2,
            _ if near_equal => v / c + r / c2,
            _ => 2.0 * v + r / c2,
        })
        .collect();
    ScalarField::new(*v.grid(), values)
}

/// `δr(τ_j) = -∫_{l-1}^{τ_j} G(τ_j - s) ⋆ g ds` with `g` built from the signs
/// of the uncontrolled solution at `τ = l` against `r_prev`.
pub fn control_foresight(
    local_uncontrolled: &LocalTrajectory,
    r_prev: &VectorField,
    c: f64,
    p: &HeatParams,
) -> Result<LocalTrajectory> {
    check_scale(c)?;
    let v = local_uncontrolled.last();
    if v.grid() != r_prev.grid() {
        return Err(Error::InvalidArgument("grid mismatch between solution and control".into()));
    }
    let g = VectorField::new([
        foresight_source(v.component(0), r_prev.component(0), c)?,
        foresight_source(v.component(1), r_prev.component(1), c)?,
        foresight_source(v.component(2), r_prev.component(2), c)?,
    ])?;
    let neg_g = g.scale(-1.0);
    constant_source(&neg_g, p, local_uncontrolled.step(), local_uncontrolled.intervals())
}

/// `max(‖f‖_{H^m}, ‖f‖_{C^m})`.
pub fn hm_cm_norm(f: &VectorField, m: u32) -> Result<f64> {
    Ok(sobolev_norm(f, m)?.max(cm_sup_norm(f, m)?))
}

/// Add the increments nodewise and advance the control state.
pub fn apply_control(
    traj_uncontrolled: &LocalTrajectory,
    incr: &LocalTrajectory,
    state: &ControlState,
    m: u32,
) -> Result<(LocalTrajectory, ControlState)> {
    let controlled = traj_uncontrolled.add(incr)?;
    let r = state.r.add(incr.last())?;
    let mut history = state.history.clone();
    history.push(hm_cm_norm(&r, m)?);
    Ok((controlled, ControlState { r, history }))
}
