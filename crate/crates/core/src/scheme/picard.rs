//! Picard sub-iterations of one time step on `[l - 1, l]`.
//!
//! Each sub-iterate is evaluated through the Duhamel representation
//!
//! ```text
//! v^k(τ) = G(τ - (l-1)) ⋆ data + ∫_{l-1}^{τ} G(τ - s) ⋆ S[v^{k-1}](s) ds
//! S[w]   = ρ ( -(w·∇) w + ∂_i K₃ ⋆ Σ ∂_j w_m ∂_m w_j )
//! ```
//!
//! with the time integral done by the composite trapezoid rule on the
//! trajectory nodes. Because the nodes are equispaced the trapezoid sums
//! obey `I_j = E(Δ) (I_{j-1} + Δ/2 Ŝ_{j-1}) + Δ/2 Ŝ_j`, so one pass over the
//! nodes suffices and only two source spectra are live at a time.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SchemeConfig;
use crate::error::{Error, Result};
use crate::fields::{c0_traj_norm, sobolev_norm, GridSpec, LocalTrajectory, ScalarField, SpectralField, VectorField};
use crate::kernels::{HeatParams, NonlinearTerms, SpectralTables};

type Spectrum3 = [SpectralField; 3];

/// Precomputed propagators for one (grid, ρν, M) combination.
pub(crate) struct Stepper {
    tables: SpectralTables,
    rho: f64,
    dealias: bool,
    intervals: usize,
    /// E(Δ) with Δ = 1/M
    step_factor: Vec<f64>,
    /// E(τ_j - (l-1)) for every node
    node_factors: Vec<Vec<f64>>,
}

fn axpy(acc: &mut [Complex64], a: f64, x: &[Complex64]) {
    acc.par_iter_mut().zip(x.par_iter()).for_each(|(y, x)| *y += a * x);
}

impl Stepper {
    pub fn new(cfg: &SchemeConfig, rho: f64) -> Result<Self> {
        let p = HeatParams::new(cfg.nu, rho)?;
        Stepper::with_params(cfg.grid, &p, cfg.nodes, cfg.dealias)
    }

    pub fn with_params(grid: GridSpec, p: &HeatParams, intervals: usize, dealias: bool) -> Result<Self> {
        if intervals < 2 {
            return Err(Error::InsufficientNodes(intervals + 1));
        }
        let tables = SpectralTables::new(grid);
        let a = p.diffusivity();
        let dt = 1.0 / intervals as f64;
        let step_factor = tables.heat_factors(a * dt);
        let node_factors = (0..=intervals).map(|j| tables.heat_factors(a * j as f64 * dt)).collect();
        Ok(Stepper {
            tables,
            rho: p.rho(),
            dealias,
            intervals,
            step_factor,
            node_factors,
        })
    }

    fn dt(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    /// `ρ (convection + Leray)` of `w`, spectral.
    fn source(&self, w: &VectorField) -> Spectrum3 {
        let NonlinearTerms { convection, leray } = self.tables.nonlinear(w, self.dealias);
        let rho = self.rho;
        let mut out = convection;
        for (s, l) in out.iter_mut().zip(leray.iter()) {
            s.coeffs_mut()
                .par_iter_mut()
                .zip(l.coeffs().par_iter())
                .for_each(|(a, b)| *a = rho * (*a + b));
        }
        out
    }

    /// `ρ (-(a·∇) w + Leray term)` with a precomputed spectral Leray term.
    fn linear_source(&self, advecting: &VectorField, w: &VectorField, leray: &Spectrum3) -> Spectrum3 {
        let g = self.tables.grid;
        let mask = &self.tables.mask;
        let spectral = |f: &ScalarField| {
            let mut s = SpectralField::forward(f);
            if self.dealias {
                s.dealias(mask);
            }
            s
        };
        let ah = [0, 1, 2].map(|i| spectral(advecting.component(i)));
        let a_real = [0, 1, 2].map(|i| ah[i].to_real());
        let wh = [0, 1, 2].map(|i| spectral(w.component(i)));
        let rho = self.rho;
        [0, 1, 2].map(|i| {
            let grads: Vec<ScalarField> = (0..3).map(|j| wh[i].partial(j).into_real()).collect();
            let mut out = vec![0.0; g.len()];
            out.par_iter_mut().enumerate().for_each(|(p, o)| {
                *o = -(0..3).map(|j| a_real[j].values()[p] * grads[j].values()[p]).sum::<f64>();
            });
            let mut s = spectral(&ScalarField::from_vec(g, out));
            s.coeffs_mut()
                .par_iter_mut()
                .zip(leray[i].coeffs().par_iter())
                .for_each(|(a, b)| *a = rho * (*a + b));
            s
        })
    }

    fn leray_only(&self, w: &VectorField) -> Spectrum3 {
        self.tables.nonlinear(w, self.dealias).leray
    }

    /// One Duhamel pass. `source(j)` yields the spectral source at node j.
    fn duhamel_pass(
        &self,
        data: &VectorField,
        step: usize,
        mut source: impl FnMut(usize) -> Spectrum3,
    ) -> Result<LocalTrajectory> {
        let g = self.tables.grid;
        let half = 0.5 * self.dt();
        let data_hat = [0, 1, 2].map(|i| SpectralField::forward(data.component(i)));
        let mut integral: Spectrum3 = [0, 1, 2].map(|_| SpectralField::zeros(g));
        let mut states = Vec::with_capacity(self.intervals + 1);
        states.push(data.clone());
        let mut prev = source(0);
        for j in 1..=self.intervals {
            let curr = source(j);
            let comps = [0, 1, 2].map(|i| {
                let acc = integral[i].coeffs_mut();
                axpy(acc, half, prev[i].coeffs());
                acc.par_iter_mut()
                    .zip(self.step_factor.par_iter())
                    .for_each(|(c, &e)| *c *= e);
                axpy(acc, half, curr[i].coeffs());

                let mut v = data_hat[i].clone();
                v.scale_by(&self.node_factors[j]);
                axpy(v.coeffs_mut(), 1.0, integral[i].coeffs());
                v.into_real()
            });
            let field = VectorField::new(comps)?;
            if !field.is_finite() {
                return Err(Error::BlowUp { node: j });
            }
            states.push(field);
            prev = curr;
        }
        LocalTrajectory::new(step, states)
    }

    pub fn substep(&self, prev: &LocalTrajectory, data: &VectorField) -> Result<LocalTrajectory> {
        self.check_trajectory(prev, data)?;
        self.duhamel_pass(data, prev.step(), |j| self.source(prev.state(j)))
    }

    /// Sub-iterate of the scheme whose convection is implicit in the new
    /// iterate, solved by an inner fixed point on the same Duhamel form.
    pub fn nonstar_substep(
        &self,
        prev: &LocalTrajectory,
        data: &VectorField,
        m: u32,
        inner_tol: f64,
        k: usize,
    ) -> Result<LocalTrajectory> {
        const INNER_CAP: usize = 20;
        self.check_trajectory(prev, data)?;
        let leray: Vec<Spectrum3> = prev.states().iter().map(|s| self.leray_only(s)).collect();
        let threshold = inner_tol * (1.0 + sobolev_norm(data, m)?);
        let mut inner = prev.clone();
        let mut residual = f64::INFINITY;
        for _ in 0..INNER_CAP {
            let next = self.duhamel_pass(data, prev.step(), |j| {
                self.linear_source(prev.state(j), inner.state(j), &leray[j])
            })?;
            residual = c0_traj_norm(&next.sub(&inner)?, m)?;
            inner = next;
            if residual <= threshold {
                return Ok(inner);
            }
        }
        Err(Error::NonstarInnerDivergence { k, residual })
    }

    /// Trajectory of the time-constant source `src` alone, starting from zero.
    pub fn constant_source_duhamel(&self, src: &VectorField, step: usize) -> Result<LocalTrajectory> {
        let hat = [0, 1, 2].map(|i| SpectralField::forward(src.component(i)));
        let zero = VectorField::zeros(self.tables.grid);
        self.duhamel_pass(&zero, step, |_| hat.clone())
    }

    fn check_trajectory(&self, prev: &LocalTrajectory, data: &VectorField) -> Result<()> {
        if prev.grid() != data.grid() || *data.grid() != self.tables.grid {
            return Err(Error::InvalidArgument("grid mismatch between trajectory, data and config".into()));
        }
        if prev.intervals() != self.intervals {
            return Err(Error::InvalidArgument(format!(
                "trajectory has {} intervals, config expects {}",
                prev.intervals(),
                self.intervals
            )));
        }
        if prev.first() != data {
            return Err(Error::InvalidArgument(
                "the previous sub-iterate must start at the step's data".into(),
            ));
        }
        data.validate()
    }
}

/// One Picard sub-iteration `v^{k-1} ↦ v^k`. Node 0 is the data, bit-exact.
pub fn picard_substep(
    traj_prev: &LocalTrajectory,
    data: &VectorField,
    cfg: &SchemeConfig,
    rho: f64,
) -> Result<LocalTrajectory> {
    Stepper::new(cfg, rho)?.substep(traj_prev, data)
}

/// One sub-iteration of the implicit-convection scheme
/// `∂_τ v^k - ρνΔv^k + ρ (v^{k-1}·∇) v^k = ρ Leray(v^{k-1})`.
pub fn nonstar_substep(
    traj_prev: &LocalTrajectory,
    data: &VectorField,
    cfg: &SchemeConfig,
    rho: f64,
) -> Result<LocalTrajectory> {
    Stepper::new(cfg, rho)?.nonstar_substep(traj_prev, data, cfg.m, cfg.tol / 10.0, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// `max_subiter` reached while every ratio stayed ≤ 1.
    SlowConvergence,
}

/// Result of iterating the sub-steps of one time step to convergence.
#[derive(Debug, Clone)]
pub struct LocalSolution {
    pub rho: f64,
    /// Converged `v^{*,ρ,l}` on the nodes.
    pub trajectory: LocalTrajectory,
    /// The first sub-iterate `v^{*,ρ,l,1}`.
    pub first_iterate: LocalTrajectory,
    /// `Σ_{k≥2} δv^k`, accumulated nodewise.
    pub tail_sum: LocalTrajectory,
    /// `sup_τ ‖δv^k‖_{H^m}` for k = 1, 2, ...
    pub increment_norms: Vec<f64>,
    /// `‖δv^k‖ / ‖δv^{k-1}‖` for k ≥ 2.
    pub ratios: Vec<f64>,
    /// Same ratios for the squared norms.
    pub squared_ratios: Vec<f64>,
    /// `δv^k(l, ·)` for k ≥ 2.
    pub final_increments: Vec<VectorField>,
    pub n_subiter: usize,
    pub status: SolveStatus,
}

impl LocalSolution {
    pub fn first_increment_norm(&self) -> f64 {
        self.increment_norms.first().copied().unwrap_or(0.0)
    }
}

pub(crate) fn iterate(
    data: &VectorField,
    cfg: &SchemeConfig,
    rho: f64,
    step: usize,
    max_subiter: usize,
    mut substep: impl FnMut(&LocalTrajectory, usize) -> Result<LocalTrajectory>,
) -> Result<LocalSolution> {
    data.validate()?;
    let threshold = cfg.tol * (1.0 + sobolev_norm(data, cfg.m)?);
    let mut prev = LocalTrajectory::constant(step, data, cfg.nodes)?;
    let mut first_iterate = None;
    let mut tail_sum = LocalTrajectory::zeros(step, *data.grid(), cfg.nodes)?;
    let mut increment_norms: Vec<f64> = Vec::new();
    let mut ratios = Vec::new();
    let mut final_increments = Vec::new();
    let mut status = SolveStatus::SlowConvergence;

    for k in 1..=max_subiter {
        let curr = substep(&prev, k)?;
        let delta = curr.sub(&prev)?;
        let norm = c0_traj_norm(&delta, cfg.m)?;
        if k == 1 {
            first_iterate = Some(curr.clone());
        } else {
            let last = *increment_norms.last().unwrap();
            let ratio = if last > 0.0 { norm / last } else { 0.0 };
            if ratio > 1.0 && ratios.last().is_some_and(|&r: &f64| r > 1.0) {
                return Err(Error::Divergence {
                    k,
                    prev: *ratios.last().unwrap(),
                    curr: ratio,
                });
            }
            ratios.push(ratio);
            final_increments.push(delta.last().clone());
            tail_sum = tail_sum.add(&delta)?;
        }
        increment_norms.push(norm);
        prev = curr;
        if norm <= threshold {
            status = SolveStatus::Converged;
            break;
        }
    }
    let n_subiter = increment_norms.len();
    Ok(LocalSolution {
        rho,
        trajectory: prev,
        first_iterate: first_iterate.expect("at least one sub-iteration"),
        tail_sum,
        increment_norms,
        squared_ratios: ratios.iter().map(|r| r * r).collect(),
        ratios,
        final_increments,
        n_subiter,
        status,
    })
}

/// Iterate [`picard_substep`] from the data held constant in τ until the
/// trajectory H^m norm of the increment falls below tolerance.
pub fn local_solve(data: &VectorField, cfg: &SchemeConfig, rho: f64) -> Result<LocalSolution> {
    local_solve_at(data, cfg, rho, 1)
}

/// [`local_solve`] for time step `step` (sets the local time window).
pub fn local_solve_at(data: &VectorField, cfg: &SchemeConfig, rho: f64, step: usize) -> Result<LocalSolution> {
    let stepper = Stepper::new(cfg, rho)?;
    iterate(data, cfg, rho, step, cfg.max_subiter, |prev, _| stepper.substep(prev, data))
}

/// Same iteration with the implicit-convection sub-steps.
pub fn local_solve_nonstar(data: &VectorField, cfg: &SchemeConfig, rho: f64) -> Result<LocalSolution> {
    let stepper = Stepper::new(cfg, rho)?;
    let inner_tol = cfg.tol / 10.0;
    iterate(data, cfg, rho, 1, cfg.max_subiter, |prev, k| {
        stepper.nonstar_substep(prev, data, cfg.m, inner_tol, k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::duhamel_step;

    fn cfg(n: usize, m: usize) -> SchemeConfig {
        let mut c = SchemeConfig::new(GridSpec::periodic_2pi(n).unwrap());
        c.nodes = m;
        c
    }

    #[test]
    fn recursive_duhamel_matches_direct_sum() {
        let c = cfg(16, 4);
        let stepper = Stepper::new(&c, 0.3).unwrap();
        let src = VectorField::from_fn(c.grid, |p| [p[0].sin() * p[1].cos(), (2.0 * p[2]).sin(), 0.25]);
        let traj = stepper.constant_source_duhamel(&src, 1).unwrap();
        let p = HeatParams::new(c.nu, 0.3).unwrap();
        let times = traj.node_times();
        for j in 1..=4 {
            let direct = duhamel_step(&times[..=j], &vec![src.clone(); j + 1], &p, times[j]).unwrap();
            assert!(traj.state(j).max_abs_diff(&direct) < 1e-14);
        }
        assert_eq!(traj.state(0), &VectorField::zeros(c.grid));
    }

    #[test]
    fn zero_and_constant_data() {
        let c = cfg(8, 4);
        let zero = VectorField::zeros(c.grid);
        let sol = local_solve(&zero, &c, 0.5).unwrap();
        assert_eq!(sol.n_subiter, 1);
        assert_eq!(sol.status, SolveStatus::Converged);
        assert!(sol.trajectory.states().iter().all(|s| s.sup_abs() == 0.0));

        let constant = VectorField::constant(c.grid, [1.0, -2.0, 0.5]);
        let prev = LocalTrajectory::constant(1, &constant, 4).unwrap();
        let next = picard_substep(&prev, &constant, &c, 0.5).unwrap();
        assert!(next.max_abs_diff(&prev) < 1e-14);
    }

    #[test]
    fn rejects_mismatched_start() {
        let c = cfg(8, 4);
        let a = VectorField::constant(c.grid, [1.0, 0.0, 0.0]);
        let b = VectorField::constant(c.grid, [2.0, 0.0, 0.0]);
        let prev = LocalTrajectory::constant(1, &a, 4).unwrap();
        assert!(matches!(picard_substep(&prev, &b, &c, 0.1), Err(Error::InvalidArgument(_))));
        let short = LocalTrajectory::constant(1, &a, 3).unwrap();
        assert!(matches!(picard_substep(&short, &a, &c, 0.1), Err(Error::InvalidArgument(_))));
    }
}
