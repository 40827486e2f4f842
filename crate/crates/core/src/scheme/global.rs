use serde::{Deserialize, Serialize};

use super::picard::{local_solve_at, LocalSolution, SolveStatus};
use super::step_size::{foresight_step_size, step_size_adaptive, step_size_theorem};
use super::{SchemeConfig, StepPolicy};
use crate::control::{
    apply_control, control_consumption, control_foresight, control_neg_first_increment, control_simple,
    init_control, ControlMode, ControlState,
};
use crate::error::{Error, Result};
use crate::fields::{c0_traj_norm, cm_sup_norm, divergence, sobolev_norm, LocalTrajectory, VectorField};
use crate::kernels::{compute_constants, leray_source, HeatParams, SchemeConstants};

/// Measurements of one time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub l: usize,
    pub rho: f64,
    /// `C^{l-1}` fed to the step-size rule.
    pub c_prev: f64,
    pub ratios: Vec<f64>,
    pub squared_ratios: Vec<f64>,
    pub n_subiter: usize,
    pub status: SolveStatus,
    /// `sup_τ ‖δv^1‖_{H^m}`
    pub first_increment_norm: f64,
    /// `‖Σ_{k≥2} δv^k(l, ·)‖_{H^m}`
    pub tail_norm: f64,
    pub hm_norm_end: f64,
    pub cm_norm_end: f64,
    pub control_hm_norm: f64,
    pub control_cm_norm: f64,
    /// `sup_τ ‖δr‖_{H^m}` of this step's increment.
    pub control_increment_norm: f64,
    pub leray_sup: f64,
    pub div_norm: f64,
    /// `Σ ρ` up to and including this step.
    pub physical_time: f64,
}

/// A whole run: configuration, step reports and checkpoint references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLedger {
    pub config: SchemeConfig,
    pub constants: SchemeConstants,
    pub initial_hm_norm: f64,
    pub initial_cm_norm: f64,
    pub steps: Vec<StepReport>,
    pub physical_time: f64,
    pub checkpoints: Vec<Option<String>>,
}

/// Everything known at the end of a step, handed to the observer.
pub struct StepOutcome<'a> {
    pub report: &'a StepReport,
    /// `v^r(l, ·)`
    pub velocity: &'a VectorField,
    pub control: &'a ControlState,
    pub solution: &'a LocalSolution,
}

/// Relative divergence bound on initial data.
pub const DIVERGENCE_TOL: f64 = 1e-8;

/// Run `n_steps` time steps from `h`.
pub fn run_global(h: &VectorField, n_steps: usize, cfg: &SchemeConfig) -> Result<RunLedger> {
    run_global_with(h, n_steps, cfg, |_| Ok(None))
}

/// [`run_global`] with an observer called after every step; the observer
/// may return a checkpoint reference that is stored in the ledger.
pub fn run_global_with(
    h: &VectorField,
    n_steps: usize,
    cfg: &SchemeConfig,
    mut observer: impl FnMut(&StepOutcome) -> Result<Option<String>>,
) -> Result<RunLedger> {
    cfg.validate()?;
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be >= 1".into()));
    }
    if *h.grid() != cfg.grid {
        return Err(Error::InvalidArgument("initial data grid differs from the config grid".into()));
    }
    h.validate()?;
    let div = divergence(h)?.l2_norm();
    let h1 = sobolev_norm(h, 1)?;
    if div > DIVERGENCE_TOL * h1 {
        return Err(Error::InvalidField(format!(
            "initial data is not divergence-free: {div:.3e} > {DIVERGENCE_TOL:.0e} x H1 norm {h1:.3e}"
        )));
    }

    let unit = HeatParams::new(cfg.nu, 1.0)?;
    let constants = compute_constants(&unit, &cfg.grid, cfg.c_n)?;
    let mut state = init_control(h, cfg.control)?;
    let mut velocity = h.clone();
    let mut steps = Vec::with_capacity(n_steps);
    let mut checkpoints = Vec::with_capacity(n_steps);
    let mut physical_time = 0.0;

    for l in 1..=n_steps {
        let at = |e: Error| Error::AtStep {
            step: l,
            source: Box::new(e),
        };
        let (report, next, next_state, solution) =
            time_step(l, &velocity, &state, cfg, &constants, physical_time).map_err(at)?;
        physical_time = report.physical_time;
        let outcome = StepOutcome {
            report: &report,
            velocity: &next,
            control: &next_state,
            solution: &solution,
        };
        checkpoints.push(observer(&outcome).map_err(at)?);
        steps.push(report);
        velocity = next;
        state = next_state;
    }

    Ok(RunLedger {
        config: cfg.clone(),
        constants,
        initial_hm_norm: sobolev_norm(h, cfg.m)?,
        initial_cm_norm: cm_sup_norm(h, cfg.m)?,
        steps,
        physical_time,
        checkpoints,
    })
}

fn select_rho(data: &VectorField, c_prev: f64, cfg: &SchemeConfig, k: &SchemeConstants) -> Result<f64> {
    match cfg.step_policy {
        StepPolicy::Theorem => step_size_theorem(c_prev, k),
        StepPolicy::Fixed { rho } => Ok(rho),
        StepPolicy::Adaptive { rho0 } => step_size_adaptive(data, cfg, rho0),
        StepPolicy::Foresight { c_kp } => match cfg.control {
            ControlMode::Foresight { c, eps } => foresight_step_size(eps, cfg.nu, c, c_kp),
            _ => Err(Error::Config("the foresight step policy needs control mode foresight".into())),
        },
    }
}

fn time_step(
    l: usize,
    data: &VectorField,
    state: &ControlState,
    cfg: &SchemeConfig,
    constants: &SchemeConstants,
    elapsed: f64,
) -> Result<(StepReport, VectorField, ControlState, LocalSolution)> {
    let m = cfg.m;
    let hm_sq = sobolev_norm(data, m)?.powi(2);
    let c_prev = cfg.c_bound.map_or(hm_sq, |c| c.max(hm_sq));
    let rho = select_rho(data, c_prev, cfg, constants)?;
    let p = HeatParams::new(cfg.nu, rho)?;
    let sol = local_solve_at(data, cfg, rho, l)?;

    let incr = match cfg.control {
        ControlMode::None => LocalTrajectory::zeros(l, cfg.grid, cfg.nodes)?,
        ControlMode::Simple { c } => control_simple(data, c, &p, l, cfg.nodes)?,
        ControlMode::NegFirstIncrement => control_neg_first_increment(&sol.first_iterate, data)?,
        ControlMode::Consumption { c } => control_consumption(data, state.r(), c, &p, &sol.first_iterate, data)?,
        ControlMode::Foresight { c, .. } => control_foresight(&sol.trajectory, state.r(), c, &p)?,
    };
    let (controlled, next_state) = apply_control(&sol.trajectory, &incr, state, m)?;
    let end = controlled.last().clone();
    let r = next_state.r();

    let report = StepReport {
        l,
        rho,
        c_prev,
        ratios: sol.ratios.clone(),
        squared_ratios: sol.squared_ratios.clone(),
        n_subiter: sol.n_subiter,
        status: sol.status,
        first_increment_norm: sol.first_increment_norm(),
        tail_norm: sobolev_norm(sol.tail_sum.last(), m)?,
        hm_norm_end: sobolev_norm(&end, m)?,
        cm_norm_end: cm_sup_norm(&end, m)?,
        control_hm_norm: sobolev_norm(r, m)?,
        control_cm_norm: cm_sup_norm(r, m)?,
        control_increment_norm: c0_traj_norm(&incr, m)?,
        leray_sup: leray_source(&end, cfg.dealias)?.sup_abs(),
        div_norm: divergence(&end)?.l2_norm(),
        physical_time: elapsed + rho,
    };
    Ok((report, end, next_state, sol))
}
