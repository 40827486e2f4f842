//! Initial data.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{read_vector_checkpoint, GridSpec, ScalarField, SpectralField, VectorField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    TaylorGreen,
    AbcFlow,
    GaussianVortex,
    File(PathBuf),
}

impl Preset {
    /// Parse `taylor_green`, `abc_flow`, `gaussian_vortex` or `file:<path>`.
    pub fn parse(s: &str) -> Result<Preset> {
        match s {
            "taylor_green" => Ok(Preset::TaylorGreen),
            "abc_flow" => Ok(Preset::AbcFlow),
            "gaussian_vortex" => Ok(Preset::GaussianVortex),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Preset::File(path.into())),
                _ => Err(Error::Config(format!("unknown preset '{s}'"))),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            Preset::TaylorGreen => "taylor_green".into(),
            Preset::AbcFlow => "abc_flow".into(),
            Preset::GaussianVortex => "gaussian_vortex".into(),
            Preset::File(p) => format!("file:{}", p.display()),
        }
    }
}

/// `(sin x cos y cos z, -cos x sin y cos z, 0)`.
pub fn taylor_green(grid: GridSpec) -> VectorField {
    VectorField::from_fn(grid, |[x, y, z]| {
        [x.sin() * y.cos() * z.cos(), -x.cos() * y.sin() * z.cos(), 0.0]
    })
}

/// ABC flow with `A = B = C = 1`.
pub fn abc_flow(grid: GridSpec) -> VectorField {
    VectorField::from_fn(grid, |[x, y, z]| {
        [z.sin() + y.cos(), x.sin() + z.cos(), y.sin() + x.cos()]
    })
}

/// Spectral curl of `(0, 0, ψ)`, divergence-free to round-off.
fn curl_of_z_potential(psi: &ScalarField) -> Result<VectorField> {
    let hat = SpectralField::forward(psi);
    VectorField::new([
        hat.partial(1).into_real(),
        hat.partial(0).into_real().scale(-1.0),
        ScalarField::zeros(*psi.grid()),
    ])
}

/// Curl of `(0, 0, exp(-|x|²/2σ²))` with `σ = L/8`.
pub fn gaussian_vortex(grid: GridSpec) -> Result<VectorField> {
    let sigma = grid.half_width() / 8.0;
    let psi = ScalarField::from_fn(grid, |[x, y, z]| (-(x * x + y * y + z * z) / (2.0 * sigma * sigma)).exp());
    curl_of_z_potential(&psi)
}

/// `base` plus a seeded divergence-free perturbation of sup norm `amplitude`
/// built from the lowest Fourier modes.
pub fn perturbed(base: &VectorField, amplitude: f64, seed: u64) -> Result<VectorField> {
    if amplitude == 0.0 {
        return Ok(base.clone());
    }
    let grid = *base.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k0 = std::f64::consts::PI / grid.half_width();
    let terms: Vec<([f64; 3], f64, f64)> = (0..8)
        .map(|_| {
            let k = [0, 1, 2].map(|_| k0 * rng.gen_range(-2i32..=2) as f64);
            (k, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let psi = ScalarField::from_fn(grid, |p| {
        terms
            .iter()
            .map(|(k, a, phase)| a * (k[0] * p[0] + k[1] * p[1] + k[2] * p[2] + phase).sin())
            .sum()
    });
    let pert = curl_of_z_potential(&psi)?;
    let sup = pert.sup_abs();
    if sup == 0.0 {
        return Ok(base.clone());
    }
    base.add(&pert.scale(amplitude / sup))
}

/// Sample `preset` on `grid`.
pub fn preset_field(preset: &Preset, grid: GridSpec) -> Result<VectorField> {
    match preset {
        Preset::TaylorGreen => Ok(taylor_green(grid)),
        Preset::AbcFlow => Ok(abc_flow(grid)),
        Preset::GaussianVortex => gaussian_vortex(grid),
        Preset::File(path) => {
            let v = read_vector_checkpoint(path)?;
            if *v.grid() != grid {
                return Err(Error::Config(format!(
                    "checkpoint grid (n = {}, L = {}) differs from the configured grid (n = {}, L = {})",
                    v.grid().n(),
                    v.grid().half_width(),
                    grid.n(),
                    grid.half_width()
                )));
            }
            Ok(v)
        }
    }
}
