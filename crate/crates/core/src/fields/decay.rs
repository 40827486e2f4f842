//! Polynomial decay rate of a field from radial shell maxima.

use super::ScalarField;
use crate::error::{Error, Result};

pub const DEFAULT_FREE_SPACE_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_EXPONENT: f64 = 12.0;

/// Settings for [`decay_exponent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Radii `[r_min, r_max)` over which shells are fitted.
    pub r_min: f64,
    pub r_max: f64,
    /// Reported exponents are capped here; super-polynomial decay hits the cap.
    pub max_exponent: f64,
    /// Required ratio of boundary-layer sup to global sup. `None` skips the
    /// check, for closed-form profiles sampled directly on a finite box.
    pub free_space_tol: Option<f64>,
}

impl DecayFit {
    pub fn new(r_min: f64, r_max: f64) -> Self {
        DecayFit {
            r_min,
            r_max,
            max_exponent: DEFAULT_MAX_EXPONENT,
            free_space_tol: Some(DEFAULT_FREE_SPACE_TOL),
        }
    }

    pub fn without_free_space_check(mut self) -> Self {
        self.free_space_tol = None;
        self
    }
}

/// Sup over the outermost grid layer divided by the global sup.
pub fn boundary_ratio(f: &ScalarField) -> f64 {
    let g = f.grid();
    let n = g.n();
    let global = f.sup_abs();
    if global == 0.0 {
        return 0.0;
    }
    let edge = |i: usize| i == 0 || i == n - 1;
    let boundary = f
        .values()
        .iter()
        .enumerate()
        .filter(|(idx, _)| g.unravel(*idx).into_iter().any(edge))
        .fold(0.0_f64, |m, (_, v)| m.max(v.abs()));
    boundary / global
}

/// Least-squares decay exponent `p` of `sup_{shell} |f| ~ r^{-p}` over radial
/// shells of width h, regressing on the radius where each shell attains its
/// maximum.
pub fn decay_exponent(f: &ScalarField, fit: &DecayFit) -> Result<f64> {
    f.validate()?;
    let global = f.sup_abs();
    if global == 0.0 {
        return Ok(fit.max_exponent);
    }
    if let Some(tol) = fit.free_space_tol {
        let ratio = boundary_ratio(f);
        if ratio >= tol {
            return Err(Error::NotFreeSpace {
                boundary: ratio * global,
                global,
                threshold: tol,
            });
        }
    }
    if !(fit.r_min > 0.0 && fit.r_max > fit.r_min) {
        return Err(Error::InvalidArgument(format!(
            "fit range must satisfy 0 < r_min < r_max, got ({}, {})",
            fit.r_min, fit.r_max
        )));
    }

    let g = f.grid();
    let h = g.spacing();
    let shells = ((fit.r_max - fit.r_min) / h).ceil() as usize;
    // (max |f|, radius of argmax) per shell
    let mut best: Vec<Option<(f64, f64)>> = vec![None; shells];
    for (idx, &v) in f.values().iter().enumerate() {
        let p = g.point(idx);
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if r < fit.r_min || r >= fit.r_max {
            continue;
        }
        let s = (((r - fit.r_min) / h) as usize).min(shells - 1);
        let a = v.abs();
        match best[s] {
            Some((m, _)) if m >= a => {}
            _ => best[s] = Some((a, r)),
        }
    }
    let points: Vec<(f64, f64)> = best.into_iter().flatten().collect();
    if points.len() < 4 {
        return Err(Error::InsufficientRange { shells: points.len() });
    }
    if points.iter().any(|&(m, _)| m == 0.0) {
        return Ok(fit.max_exponent);
    }
    let xs: Vec<f64> = points.iter().map(|&(_, r)| r.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(m, _)| (m / global).ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    Ok((-slope).min(fit.max_exponent))
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
