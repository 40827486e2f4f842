use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `a`
    Uniform,
    /// `a + b l`
    Linear,
    /// `a + b √l`
    Sqrt,
}

/// Least-squares fit of a per-step series indexed by `l = 1, 2, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundFit {
    pub kind: BoundKind,
    pub intercept: f64,
    pub slope: f64,
    /// Max absolute deviation of the series from the fitted curve.
    pub max_residual: f64,
    /// `max - min` of the series.
    pub range: f64,
}

impl BoundFit {
    /// `max_residual / range`; zero for a constant series fitted exactly.
    pub fn relative_residual(&self) -> f64 {
        if self.range > 0.0 {
            self.max_residual / self.range
        } else if self.max_residual == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn eval(&self, l: f64) -> f64 {
        match self.kind {
            BoundKind::Uniform => self.intercept,
            BoundKind::Linear => self.intercept + self.slope * l,
            BoundKind::Sqrt => self.intercept + self.slope * l.sqrt(),
        }
    }
}

pub fn fit_bound(series: &[f64], kind: BoundKind) -> Result<BoundFit> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("cannot fit an empty series".into()));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    let n = series.len() as f64;
    let basis = |l: usize| -> f64 {
        let l = (l + 1) as f64;
        match kind {
            BoundKind::Uniform => 0.0,
            BoundKind::Linear => l,
            BoundKind::Sqrt => l.sqrt(),
        }
    };
    let my = series.iter().sum::<f64>() / n;
    let (intercept, slope) = if kind == BoundKind::Uniform || series.len() == 1 {
        (my, 0.0)
    } else {
        let xs: Vec<f64> = (0..series.len()).map(basis).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(series).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let b = sxy / sxx;
        (my - b * mx, b)
    };
    let mut fit = BoundFit {
        kind,
        intercept,
        slope,
        max_residual: 0.0,
        range: 0.0,
    };
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    fit.range = hi - lo;
    fit.max_residual = series
        .iter()
        .enumerate()
        .map(|(i, &y)| (y - fit.eval((i + 1) as f64)).abs())
        .fold(0.0, f64::max);
    Ok(fit)
}
