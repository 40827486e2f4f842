//! Measured counterparts of the contraction and growth statements: bound
//! fits, residuals, decay checks and report output.

mod fit;
mod report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{boundary_ratio, decay_exponent, sobolev_norm, time_derivative, DecayFit, LocalTrajectory, ScalarField, VectorField};
use crate::kernels::{leray_source, SpectralTables};
use crate::scheme::{SchemeConfig, StepReport};

pub use fit::{fit_bound, BoundFit, BoundKind};
pub use report::{to_json_string, write_contraction_csv, write_steps_csv, RunReport};

/// Sup norm of the Leray term of `v` (no dealiasing).
pub fn leray_sup(v: &VectorField) -> Result<f64> {
    Ok(leray_source(v, false)?.sup_abs())
}

/// Max over interior nodes of the L² norm of
/// `∂_τ v - ρνΔv + ρ(v·∇)v - ρ Leray(v)`, with a centered time difference.
pub fn nse_residual(traj: &LocalTrajectory, cfg: &SchemeConfig, rho: f64) -> Result<f64> {
    if *traj.grid() != cfg.grid {
        return Err(Error::InvalidArgument("trajectory grid differs from config grid".into()));
    }
    let tables = SpectralTables::new(cfg.grid);
    let a = rho * cfg.nu;
    let mut worst: f64 = 0.0;
    for j in 1..traj.intervals() {
        let v = traj.state(j);
        let dv = time_derivative(traj, j)?;
        let terms = tables.nonlinear(v, cfg.dealias);
        let comps = [0, 1, 2].map(|i| {
            let mut rhs = crate::fields::SpectralField::forward(v.component(i));
            for (c, k2) in rhs.coeffs_mut().iter_mut().zip(&tables.k2) {
                *c *= -a * k2;
            }
            for (c, (conv, ler)) in rhs
                .coeffs_mut()
                .iter_mut()
                .zip(terms.convection[i].coeffs().iter().zip(terms.leray[i].coeffs()))
            {
                *c += rho * (conv + ler);
            }
            let rhs = rhs.into_real();
            dv.component(i).sub(&rhs)
        });
        let [a0, a1, a2] = comps;
        let res = VectorField::new([a0?, a1?, a2?])?;
        worst = worst.max(sobolev_norm(&res, 0)?);
    }
    Ok(worst)
}

/// Decay exponents of one increment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementDecay {
    pub k: usize,
    /// `None` for a component that is not negligible at the box boundary.
    pub exponents: [Option<f64>; 3],
    pub boundary_ratios: [f64; 3],
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub m_target: f64,
    pub increments: Vec<IncrementDecay>,
    pub pass: bool,
}

/// Slack subtracted from the target order when judging a fitted exponent.
pub const DECAY_SLACK: f64 = 0.5;

/// Decay exponents of the increments `δv^k`, k = 2, 3, ...; passes when
/// every component is free-space-like and decays at least like
/// `|x|^{-(m_target - 0.5)}`.
pub fn decay_inheritance(increments: &[VectorField], m_target: f64, fit: &DecayFit) -> Result<DecayReport> {
    let mut rows = Vec::with_capacity(increments.len());
    for (idx, inc) in increments.iter().enumerate() {
        inc.validate()?;
        let mut exponents = [None; 3];
        let mut ratios = [0.0; 3];
        for d in 0..3 {
            let f: &ScalarField = inc.component(d);
            ratios[d] = boundary_ratio(f);
            exponents[d] = match decay_exponent(f, fit) {
                Ok(p) => Some(p),
                Err(Error::NotFreeSpace { .. }) => None,
                Err(e) => return Err(e),
            };
        }
        let pass = exponents.iter().all(|p| p.is_some_and(|p| p >= m_target - DECAY_SLACK));
        rows.push(IncrementDecay {
            k: idx + 2,
            exponents,
            boundary_ratios: ratios,
            pass,
        });
    }
    Ok(DecayReport {
        m_target,
        pass: rows.iter().all(|r| r.pass),
        increments: rows,
    })
}

/// Ratio bound of the contraction statement.
pub const CONTRACTION_BOUND: f64 = 0.5;
/// Bound on the first increment.
pub const FIRST_INCREMENT_BOUND: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionRow {
    pub l: usize,
    pub k: usize,
    pub ratio: f64,
    pub squared_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstIncrementRow {
    pub l: usize,
    pub norm: f64,
    pub converged_at_first: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ContractionTable {
    pub rows: Vec<ContractionRow>,
    pub first_increments: Vec<FirstIncrementRow>,
}

impl ContractionTable {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass && r.squared_ratio <= CONTRACTION_BOUND)
            && self.first_increments.iter().all(|r| r.pass)
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }
}

/// One row per measured ratio (k ≥ 2) plus the first-increment check per step.
pub fn contraction_table(reports: &[StepReport]) -> ContractionTable {
    let mut table = ContractionTable::default();
    for rep in reports {
        for (i, (&ratio, &squared_ratio)) in rep.ratios.iter().zip(&rep.squared_ratios).enumerate() {
            table.rows.push(ContractionRow {
                l: rep.l,
                k: i + 2,
                ratio,
                squared_ratio,
                pass: ratio <= CONTRACTION_BOUND,
            });
        }
        table.first_increments.push(FirstIncrementRow {
            l: rep.l,
            norm: rep.first_increment_norm,
            converged_at_first: rep.n_subiter == 1,
            pass: rep.first_increment_norm <= FIRST_INCREMENT_BOUND,
        });
    }
    table
}
