use rayon::prelude::*;

use super::{GridSpec, LocalTrajectory, ScalarField, SpectralField, VectorField};
use crate::error::{Error, Result};

pub const MAX_SOBOLEV_ORDER: u32 = 4;

/// Anything made of scalar components on one grid.
pub trait Components {
    fn scalar_components(&self) -> &[ScalarField];
}

impl Components for ScalarField {
    fn scalar_components(&self) -> &[ScalarField] {
        std::slice::from_ref(self)
    }
}

impl Components for VectorField {
    fn scalar_components(&self) -> &[ScalarField] {
        self.components()
    }
}

/// All multi-indices α with |α| ≤ m, ordered by total degree.
pub fn multi_indices(m: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for total in 0..=m {
        for a in (0..=total).rev() {
            for b in (0..=total - a).rev() {
                out.push([a, b, total - a - b]);
            }
        }
    }
    out
}

fn check_order(m: u32) -> Result<()> {
    if m > MAX_SOBOLEV_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Sobolev order {m} exceeds the supported maximum {MAX_SOBOLEV_ORDER}"
        )));
    }
    Ok(())
}

/// Spectral weight Σ_{|α|≤m} ξ^{2α} per mode.
pub(crate) fn sobolev_weights(grid: &GridSpec, m: u32) -> Vec<f64> {
    let n = grid.n();
    let sq: Vec<f64> = (0..n).map(|q| grid.deriv_wavenumber(q).powi(2)).collect();
    let alphas = multi_indices(m);
    let mut out = vec![0.0; grid.len()];
    out.par_chunks_mut(n * n).enumerate().for_each(|(a, plane)| {
        for b in 0..n {
            for c in 0..n {
                plane[b * n + c] = alphas
                    .iter()
                    .map(|al| sq[a].powi(al[0] as i32) * sq[b].powi(al[1] as i32) * sq[c].powi(al[2] as i32))
                    .sum();
            }
        }
    });
    out
}

pub(crate) fn spectral_sobolev_sq(f: &SpectralField, weights: &[f64]) -> f64 {
    let g = f.grid();
    let norm = g.cell_volume() / g.len() as f64;
    norm * f
        .coeffs()
        .par_iter()
        .zip(weights.par_iter())
        .map(|(c, w)| w * c.norm_sqr())
        .sum::<f64>()
}

/// H^m norm, `sqrt(Σ_{|α|≤m} ‖D^α f‖²_{L²})` over the box, evaluated on
/// the spectral side via Parseval. Vector fields take the max over
/// components.
pub fn sobolev_norm<F: Components + ?Sized>(f: &F, m: u32) -> Result<f64> {
    check_order(m)?;
    let comps = f.scalar_components();
    comps.iter().try_for_each(ScalarField::validate)?;
    let weights = sobolev_weights(comps[0].grid(), m);
    Ok(comps
        .iter()
        .map(|c| spectral_sobolev_sq(&SpectralField::forward(c), &weights).sqrt())
        .fold(0.0, f64::max))
}

/// C^m part of the H^m ∩ C^m norm: max over components of
/// Σ_{|α|≤m} sup |D^α f|.
pub fn cm_sup_norm<F: Components + ?Sized>(f: &F, m: u32) -> Result<f64> {
    check_order(m)?;
    let comps = f.scalar_components();
    comps.iter().try_for_each(ScalarField::validate)?;
    let alphas = multi_indices(m);
    let mut best: f64 = 0.0;
    for c in comps {
        let spec = SpectralField::forward(c);
        let total: f64 = alphas
            .iter()
            .map(|&al| {
                if al == [0, 0, 0] {
                    c.sup_abs()
                } else {
                    spec.derivative(al).into_real().sup_abs()
                }
            })
            .sum();
        best = best.max(total);
    }
    Ok(best)
}

/// Spectral ∂₁v₁ + ∂₂v₂ + ∂₃v₃.
pub fn divergence(v: &VectorField) -> Result<ScalarField> {
    v.validate()?;
    let mut acc = SpectralField::zeros(*v.grid());
    for d in 0..3 {
        let part = SpectralField::forward(v.component(d)).partial(d);
        acc.coeffs_mut()
            .par_iter_mut()
            .zip(part.coeffs().par_iter())
            .for_each(|(a, b)| *a += b);
    }
    Ok(acc.into_real())
}

/// `sup_τ ‖f(τ)‖_{H^m}` over the trajectory nodes.
pub fn c0_traj_norm(t: &LocalTrajectory, m: u32) -> Result<f64> {
    check_order(m)?;
    let norms = t
        .states()
        .par_iter()
        .map(|s| sobolev_norm(s, m))
        .collect::<Result<Vec<f64>>>()?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// Second-order finite-difference ∂_τ at node `j`: centered in the
/// interior, one-sided three-point stencils at the ends.
pub fn time_derivative(t: &LocalTrajectory, j: usize) -> Result<VectorField> {
    let s = t.states();
    let last = s.len() - 1;
    let inv = 1.0 / (2.0 * t.dt());
    // written in differences so a constant trajectory gives exactly zero
    let stencil = |near: &VectorField, far: &VectorField, at: &VectorField, sign: f64| {
        let d1 = near.sub(at)?;
        let d2 = far.sub(at)?;
        d1.zip_with(&d2, |a, b| sign * (4.0 * a - b) * inv)
    };
    if j == 0 {
        stencil(&s[1], &s[2], &s[0], 1.0)
    } else if j == last {
        stencil(&s[last - 1], &s[last - 2], &s[last], -1.0)
    } else {
        s[j + 1].zip_with(&s[j - 1], |a, b| (a - b) * inv)
    }
}

/// `c0_traj_norm + sup_τ ‖∂_τ f(τ)‖_{H^m}` with finite-difference ∂_τ.
pub fn c1_traj_norm(t: &LocalTrajectory, m: u32) -> Result<f64> {
    let c0 = c0_traj_norm(t, m)?;
    let mut dmax: f64 = 0.0;
    for j in 0..t.states().len() {
        dmax = dmax.max(sobolev_norm(&time_derivative(t, j)?, m)?);
    }
    Ok(c0 + dmax)
}
