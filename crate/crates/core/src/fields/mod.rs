//! Periodic grid, real and spectral fields, norms and differential operators.
//!
//! The box `[-L, L)³` carries `n` points per axis. Scalar values are stored
//! row-major with index `(i * n + j) * n + k`, where `i`, `j`, `k` step along
//! x, y, z. Wavevectors are `ξ = (π / L) · q` with integer `q` in
//! `-n/2 .. n/2 - 1`.

mod checkpoint;
mod decay;
mod fft;
mod norms;
mod spectral;

pub use checkpoint::{read_checkpoint, read_vector_checkpoint, write_checkpoint, Checkpoint};
pub use decay::{decay_exponent, boundary_ratio, DecayFit, DEFAULT_FREE_SPACE_TOL, DEFAULT_MAX_EXPONENT};
pub use norms::{
    c0_traj_norm, c1_traj_norm, cm_sup_norm, divergence, multi_indices, sobolev_norm,
    time_derivative, Components,
};
pub use spectral::SpectralField;

pub(crate) use fft::Fft3;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    n: usize,
    half_width: f64,
}

impl GridSpec {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        Ok(GridSpec { n, half_width })
    }

    /// `[-π, π)³` with `n` points per axis.
    pub fn periodic_2pi(n: usize) -> Result<Self> {
        GridSpec::new(n, std::f64::consts::PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Number of grid points, n³.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.unravel(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Signed integer mode of FFT index `q`.
    pub fn mode(&self, q: usize) -> i64 {
        if q < self.n / 2 {
            q as i64
        } else {
            q as i64 - self.n as i64
        }
    }

    pub fn wavenumber(&self, q: usize) -> f64 {
        self.mode(q) as f64 * std::f64::consts::PI / self.half_width
    }

    /// Wavenumber used by spectral derivatives: the Nyquist mode is treated
    /// as having zero derivative so that derivatives of real fields stay real.
    pub fn deriv_wavenumber(&self, q: usize) -> f64 {
        if q == self.n / 2 {
            0.0
        } else {
            self.wavenumber(q)
        }
    }

    /// |ξ|² per spectral index, including the Nyquist planes.
    pub fn wavenumber_sq(&self) -> Vec<f64> {
        let n = self.n;
        let k: Vec<f64> = (0..n).map(|q| self.wavenumber(q).powi(2)).collect();
        let mut out = Vec::with_capacity(self.len());
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    out.push(k[a] + k[b] + k[c]);
                }
            }
        }
        out
    }

    /// 2/3-rule mask: true where every |mode| < n/3.
    pub fn dealias_mask(&self) -> Vec<bool> {
        let n = self.n;
        let keep: Vec<bool> = (0..n).map(|q| 3 * self.mode(q).unsigned_abs() < n as u64).collect();
        let mut out = Vec::with_capacity(self.len());
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    out.push(keep[a] && keep[b] && keep[c]);
                }
            }
        }
        out
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::InvalidArgument(format!(
                "grid mismatch: {self:?} vs {other:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    /// Checked constructor: length must be n³ and every value finite.
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let f = ScalarField::new_unchecked(grid, values)?;
        f.validate()?;
        Ok(f)
    }

    /// Length-checked only; finiteness is left to the consumer
    /// (norms and the scheme reject non-finite input).
    pub fn new_unchecked(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(ScalarField { grid, values })
    }

    pub(crate) fn from_vec(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        ScalarField::constant(grid, 0.0)
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        ScalarField {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|idx| f(grid.point(idx))).collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(pos) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "non-finite value {} at grid index {pos}",
                self.values[pos]
            )));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Real-space L² norm, `sqrt(h³ Σ f²)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn scale(&self, a: f64) -> ScalarField {
        self.map(|v| a * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        self.grid.check_same(&other.grid)?;
        Ok(ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: [ScalarField; 3],
}

impl VectorField {
    pub fn new(components: [ScalarField; 3]) -> Result<Self> {
        let g = components[0].grid;
        for c in &components[1..] {
            g.check_same(&c.grid)?;
        }
        Ok(VectorField { components })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        VectorField::constant(grid, [0.0; 3])
    }

    pub fn constant(grid: GridSpec, c: [f64; 3]) -> Self {
        VectorField {
            components: c.map(|ci| ScalarField::constant(grid, ci)),
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut comps = [Vec::new(), Vec::new(), Vec::new()];
        for c in &mut comps {
            c.reserve(grid.len());
        }
        for idx in 0..grid.len() {
            let v = f(grid.point(idx));
            for d in 0..3 {
                comps[d].push(v[d]);
            }
        }
        VectorField {
            components: comps.map(|v| ScalarField::from_vec(grid, v)),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.components[0].grid
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.components
    }

    pub fn validate(&self) -> Result<()> {
        self.components.iter().try_for_each(ScalarField::validate)
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }

    pub fn sup_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.sup_abs()))
    }

    pub fn scale(&self, a: f64) -> VectorField {
        VectorField {
            components: [0, 1, 2].map(|d| self.components[d].scale(a)),
        }
    }

    pub fn zip_with(&self, other: &VectorField, f: impl Fn(f64, f64) -> f64 + Copy) -> Result<VectorField> {
        self.grid().check_same(other.grid())?;
        Ok(VectorField {
            components: [0, 1, 2].map(|d| {
                ScalarField::from_vec(
                    *self.grid(),
                    self.components[d]
                        .values
                        .iter()
                        .zip(&other.components[d].values)
                        .map(|(&a, &b)| f(a, b))
                        .collect(),
                )
            }),
        })
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn max_abs_diff(&self, other: &VectorField) -> f64 {
        (0..3).fold(0.0, |m, d| m.max(self.components[d].max_abs_diff(&other.components[d])))
    }
}

/// A vector field sampled at `M + 1` equispaced local times
/// `τ_j = (l - 1) + j / M` spanning one unit step `[l - 1, l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTrajectory {
    step: usize,
    states: Vec<VectorField>,
}

impl LocalTrajectory {
    pub fn new(step: usize, states: Vec<VectorField>) -> Result<Self> {
        if states.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "a local trajectory needs M >= 2 (at least 3 states), got {}",
                states.len()
            )));
        }
        if step == 0 {
            return Err(Error::InvalidArgument("time step index starts at 1".into()));
        }
        let g = *states[0].grid();
        for s in &states[1..] {
            g.check_same(s.grid())?;
        }
        Ok(LocalTrajectory { step, states })
    }

    /// The field held constant in τ on every node.
    pub fn constant(step: usize, field: &VectorField, m: usize) -> Result<Self> {
        LocalTrajectory::new(step, vec![field.clone(); m + 1])
    }

    pub fn zeros(step: usize, grid: GridSpec, m: usize) -> Result<Self> {
        LocalTrajectory::constant(step, &VectorField::zeros(grid), m)
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Number of intervals M.
    pub fn intervals(&self) -> usize {
        self.states.len() - 1
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    pub fn start_time(&self) -> f64 {
        (self.step - 1) as f64
    }

    pub fn node_time(&self, j: usize) -> f64 {
        self.start_time() + j as f64 / self.intervals() as f64
    }

    pub fn node_times(&self) -> Vec<f64> {
        (0..self.states.len()).map(|j| self.node_time(j)).collect()
    }

    pub fn grid(&self) -> &GridSpec {
        self.states[0].grid()
    }

    pub fn states(&self) -> &[VectorField] {
        &self.states
    }

    pub fn state(&self, j: usize) -> &VectorField {
        &self.states[j]
    }

    pub fn first(&self) -> &VectorField {
        &self.states[0]
    }

    pub fn last(&self) -> &VectorField {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn into_states(self) -> Vec<VectorField> {
        self.states
    }

    /// Nodewise `f(self_j, other_j)`.
    pub fn zip_with(
        &self,
        other: &LocalTrajectory,
        f: impl Fn(&VectorField, &VectorField) -> Result<VectorField>,
    ) -> Result<LocalTrajectory> {
        if self.states.len() != other.states.len() {
            return Err(Error::InvalidArgument(format!(
                "node count mismatch: {} vs {}",
                self.states.len(),
                other.states.len()
            )));
        }
        let states = self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        LocalTrajectory::new(self.step, states)
    }

    pub fn sub(&self, other: &LocalTrajectory) -> Result<LocalTrajectory> {
        self.zip_with(other, VectorField::sub)
    }

    pub fn add(&self, other: &LocalTrajectory) -> Result<LocalTrajectory> {
        self.zip_with(other, VectorField::add)
    }

    pub fn max_abs_diff(&self, other: &LocalTrajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        assert!(GridSpec::new(6, 1.0).is_err());
        assert!(GridSpec::new(9, 1.0).is_err());
        assert!(GridSpec::new(8, 0.0).is_err());
        assert!(GridSpec::new(8, f64::NAN).is_err());
        let g = GridSpec::new(16, 2.0).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.coord(0), -2.0);
        assert_eq!(g.mode(7), 7);
        assert_eq!(g.mode(8), -8);
        assert_eq!(g.deriv_wavenumber(8), 0.0);
        let idx = g.index(3, 5, 7);
        assert_eq!(g.unravel(idx), [3, 5, 7]);
    }

    #[test]
    fn scalar_field_rejects_bad_input() {
        let g = GridSpec::new(8, 1.0).unwrap();
        assert!(ScalarField::new(g, vec![0.0; 10]).is_err());
        let mut v = vec![0.0; g.len()];
        v[3] = f64::INFINITY;
        assert!(matches!(ScalarField::new(g, v.clone()), Err(Error::InvalidField(_))));
        assert!(ScalarField::new_unchecked(g, v).is_ok());
    }

    #[test]
    fn dealias_mask_keeps_low_modes() {
        let g = GridSpec::new(12, 1.0).unwrap();
        let mask = g.dealias_mask();
        assert!(mask[g.index(3, 0, 0)]);
        assert!(!mask[g.index(4, 0, 0)]);
        assert!(mask[g.index(9, 11, 0)]);
        assert!(!mask[g.index(6, 0, 0)]);
    }

    #[test]
    fn trajectory_requires_two_intervals() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = VectorField::zeros(g);
        assert!(LocalTrajectory::new(1, vec![f.clone(), f.clone()]).is_err());
        let t = LocalTrajectory::constant(3, &f, 4).unwrap();
        assert_eq!(t.node_times(), vec![2.0, 2.25, 2.5, 2.75, 3.0]);
    }
}
