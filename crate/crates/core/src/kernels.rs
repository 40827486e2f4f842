//! Heat kernel, Duhamel quadrature, the convection and Leray source terms,
//! and the constants entering the step-size bound.
//!
//! Convolutions with the heat kernel `G` and with `∂_i K₃` are realized as
//! exact spectral multipliers on the periodic box:
//!
//! * `G(dt) ⋆ f`  ↔  `exp(-ρ ν dt |ξ|²) f̂(ξ)`
//! * `∂_i K₃ ⋆ q` ↔  `-i ξ_i / |ξ|² q̂(ξ)`, with the ξ = 0 mode set to zero.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{GridSpec, ScalarField, SpectralField, VectorField};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatParams {
    nu: f64,
    rho: f64,
}

impl HeatParams {
    pub fn new(nu: f64, rho: f64) -> Result<Self> {
        for (name, v) in [("viscosity", nu), ("step-size factor", rho)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(HeatParams { nu, rho })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Effective diffusivity ρν in local time.
    pub fn diffusivity(&self) -> f64 {
        self.nu * self.rho
    }
}

/// Per-mode heat multipliers `exp(-a |ξ|²)`.
pub(crate) fn heat_factors(grid: &GridSpec, a: f64) -> Vec<f64> {
    grid.wavenumber_sq().into_iter().map(|k2| (-a * k2).exp()).collect()
}

/// Fields the heat semigroup acts on componentwise.
pub trait Propagate: Sized + Clone {
    #[doc(hidden)]
    fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self;
    #[doc(hidden)]
    fn grid_spec(&self) -> GridSpec;
    #[doc(hidden)]
    fn check(&self) -> Result<()>;
}

impl Propagate for ScalarField {
    fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        f(self)
    }
    fn grid_spec(&self) -> GridSpec {
        *self.grid()
    }
    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl Propagate for VectorField {
    fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        let [a, b, c] = self.components();
        VectorField::new([f(a), f(b), f(c)]).expect("components share a grid")
    }
    fn grid_spec(&self) -> GridSpec {
        *self.grid()
    }
    fn check(&self) -> Result<()> {
        self.validate()
    }
}

/// Convolution with the heat kernel over a local-time increment `dt`.
pub fn heat_propagate<F: Propagate>(f: &F, p: &HeatParams, dt: f64) -> Result<F> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "heat propagation needs a finite dt >= 0, got {dt}"
        )));
    }
    f.check()?;
    if dt == 0.0 {
        return Ok(f.clone());
    }
    let factors = heat_factors(&f.grid_spec(), p.diffusivity() * dt);
    Ok(f.map_components(|c| {
        let mut s = SpectralField::forward(c);
        s.scale_by(&factors);
        s.into_real()
    }))
}

/// Composite-trapezoid approximation of `∫ G(τ - s) ⋆ S(s) ds` from the
/// sources sampled at `times` (non-decreasing, all ≤ `tau`).
pub fn duhamel_step(times: &[f64], sources: &[VectorField], p: &HeatParams, tau: f64) -> Result<VectorField> {
    if times.len() != sources.len() {
        return Err(Error::InvalidArgument(format!(
            "{} source times for {} sources",
            times.len(),
            sources.len()
        )));
    }
    if sources.len() < 2 {
        return Err(Error::InsufficientNodes(sources.len()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || *times.last().unwrap() > tau {
        return Err(Error::InvalidArgument(
            "source times must be non-decreasing and not exceed the target time".into(),
        ));
    }
    let grid = *sources[0].grid();
    let last = times.len() - 1;
    let mut acc = VectorField::zeros(grid);
    for (j, src) in sources.iter().enumerate() {
        let left = if j > 0 { times[j] - times[j - 1] } else { 0.0 };
        let right = if j < last { times[j + 1] - times[j] } else { 0.0 };
        let w = 0.5 * (left + right);
        if w == 0.0 {
            continue;
        }
        let propagated = heat_propagate(src, p, tau - times[j])?;
        acc = acc.zip_with(&propagated, |a, b| a + w * b)?;
    }
    Ok(acc)
}

/// Spectral convection and Leray terms of one velocity field.
pub(crate) struct NonlinearTerms {
    /// `-(v·∇) v`
    pub convection: [SpectralField; 3],
    /// `∂_i K₃ ⋆ Σ_{j,m} ∂_j v_m ∂_m v_j`
    pub leray: [SpectralField; 3],
}

/// Grid-dependent tables reused across source evaluations.
pub(crate) struct SpectralTables {
    pub grid: GridSpec,
    pub k2: Vec<f64>,
    pub mask: Vec<bool>,
}

impl SpectralTables {
    pub fn new(grid: GridSpec) -> Self {
        SpectralTables {
            grid,
            k2: grid.wavenumber_sq(),
            mask: grid.dealias_mask(),
        }
    }

    pub fn heat_factors(&self, a: f64) -> Vec<f64> {
        self.k2.par_iter().map(|&k2| (-a * k2).exp()).collect()
    }

    pub fn nonlinear(&self, v: &VectorField, dealias: bool) -> NonlinearTerms {
        let g = self.grid;
        let n = g.n();
        let mut vh = [0, 1, 2].map(|i| SpectralField::forward(v.component(i)));
        let v_real: [ScalarField; 3] = if dealias {
            for s in &mut vh {
                s.dealias(&self.mask);
            }
            [0, 1, 2].map(|i| vh[i].to_real())
        } else {
            [0, 1, 2].map(|i| v.component(i).clone())
        };
        // grad[i][j] = ∂_j v_i
        let grad: Vec<Vec<ScalarField>> = (0..3)
            .map(|i| (0..3).map(|j| vh[i].partial(j).into_real()).collect())
            .collect();

        let len = g.len();
        let convection = [0, 1, 2].map(|i| {
            let mut out = vec![0.0; len];
            out.par_iter_mut().enumerate().for_each(|(p, o)| {
                *o = -(0..3)
                    .map(|j| v_real[j].values()[p] * grad[i][j].values()[p])
                    .sum::<f64>();
            });
            let mut s = SpectralField::forward(&ScalarField::from_vec(g, out));
            if dealias {
                s.dealias(&self.mask);
            }
            s
        });

        let mut q = vec![0.0; len];
        q.par_iter_mut().enumerate().for_each(|(p, o)| {
            let mut acc = 0.0;
            for j in 0..3 {
                for m in 0..3 {
                    acc += grad[m][j].values()[p] * grad[j][m].values()[p];
                }
            }
            *o = acc;
        });
        let mut qh = SpectralField::forward(&ScalarField::from_vec(g, q));
        if dealias {
            qh.dealias(&self.mask);
        }
        let dk: Vec<f64> = (0..n).map(|q| g.deriv_wavenumber(q)).collect();
        let leray = [0, 1, 2].map(|axis| {
            let mut coeffs = qh.coeffs().to_vec();
            coeffs.par_chunks_mut(n * n).enumerate().for_each(|(a, plane)| {
                for b in 0..n {
                    for c in 0..n {
                        let idx = (a * n + b) * n + c;
                        let k2 = self.k2[idx];
                        let xi = [dk[a], dk[b], dk[c]][axis];
                        plane[b * n + c] = if k2 == 0.0 {
                            Complex64::default()
                        } else {
                            plane[b * n + c] * Complex64::new(0.0, -xi / k2)
                        };
                    }
                }
            });
            SpectralField::from_coeffs(g, coeffs)
        });
        NonlinearTerms { convection, leray }
    }
}

fn to_vector(fields: [SpectralField; 3]) -> VectorField {
    let [a, b, c] = fields;
    VectorField::new([a.into_real(), b.into_real(), c.into_real()]).expect("shared grid")
}

/// Pressure-gradient term of the Leray form: `∂_i K₃ ⋆ q` with
/// `q = Σ_{j,m} (∂_j v_m)(∂_m v_j)`, realized as the multiplier
/// `-i ξ_i / |ξ|²` and zero mean.
pub fn leray_source(v: &VectorField, dealias: bool) -> Result<VectorField> {
    v.validate()?;
    Ok(to_vector(SpectralTables::new(*v.grid()).nonlinear(v, dealias).leray))
}

/// `-(v·∇) v` componentwise; the ρ factor is the caller's.
pub fn convection_source(v: &VectorField, dealias: bool) -> Result<VectorField> {
    v.validate()?;
    Ok(to_vector(SpectralTables::new(*v.grid()).nonlinear(v, dealias).convection))
}

/// Raw constant values before clamping at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawConstants {
    pub heat_mass: f64,
    pub laplace_gradient: f64,
    pub weighted_product: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConstants {
    pub c_g: f64,
    pub c_k: f64,
    pub c_s: f64,
    pub c_n: u32,
    pub raw: RawConstants,
}

impl SchemeConstants {
    /// Constants with explicit values, e.g. for unit tests of the step formula.
    pub fn with_values(c_g: f64, c_k: f64, c_s: f64, c_n: u32) -> Result<Self> {
        if c_n < 1 || [c_g, c_k, c_s].iter().any(|c| !(c.is_finite() && *c >= 1.0)) {
            return Err(Error::InvalidArgument(
                "C_G, C_K, C_s must be finite and >= 1, c_n >= 1".into(),
            ));
        }
        Ok(SchemeConstants {
            c_g,
            c_k,
            c_s,
            c_n,
            raw: RawConstants {
                heat_mass: c_g,
                laplace_gradient: c_k,
                weighted_product: c_s,
            },
        })
    }
}

const GL_POINTS: usize = 64;

/// `∫₀¹ ∫_{ℝ³} |G(τ, y)| dy dτ` for the heat kernel of diffusivity ρν.
fn heat_kernel_l1(p: &HeatParams) -> f64 {
    let d = p.diffusivity();
    quadrature::integrate(GL_POINTS, 0.0, 1.0, |tau| {
        let var4 = 4.0 * d * tau;
        let norm = (std::f64::consts::PI * var4).powf(-1.5);
        let r_max = 12.0 * var4.sqrt();
        // radial shells of the Gaussian, split so the bulk is well sampled
        let shell = |r: f64| 4.0 * std::f64::consts::PI * r * r * norm * (-r * r / var4).exp();
        quadrature::integrate(GL_POINTS, 0.0, r_max / 3.0, shell)
            + quadrature::integrate(GL_POINTS, r_max / 3.0, r_max, shell)
    })
}

/// `∫_{|z| = r} f dS` by Gauss–Legendre in θ (split at the equator) and
/// the midpoint rule in φ.
fn shell_integral(r: f64, f: impl Fn([f64; 3]) -> f64) -> f64 {
    use std::f64::consts::PI;
    let n_phi = 32;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut acc = 0.0;
    for (th, wt) in quadrature::gauss_legendre(GL_POINTS, 0.0, PI / 2.0)
        .into_iter()
        .chain(quadrature::gauss_legendre(GL_POINTS, PI / 2.0, PI))
    {
        for k in 0..n_phi {
            let ph = dphi * (k as f64 + 0.5);
            let z = [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
            acc += wt * dphi * f(z) * r * r * th.sin();
        }
    }
    acc
}

fn laplace_gradient(z: [f64; 3], i: usize) -> f64 {
    let r = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt();
    z[i] / (4.0 * std::f64::consts::PI * r * r * r)
}

/// `∫_{B₁} |∂_i K₃| + sqrt(∫_{ℝ³∖B₁} |∂_i K₃|²)`, maximized over i.
fn laplace_gradient_constant() -> f64 {
    (0..3)
        .map(|i| {
            let inner = quadrature::integrate(GL_POINTS, 0.0, 1.0, |r| {
                shell_integral(r, |z| laplace_gradient(z, i).abs())
            });
            // r = 1/t maps (1, ∞) onto (0, 1), dr = dt / t²
            let outer = quadrature::integrate(GL_POINTS, 0.0, 1.0, |t| {
                shell_integral(1.0 / t, |z| laplace_gradient(z, i).powi(2)) / (t * t)
            });
            inner + outer.sqrt()
        })
        .fold(0.0, f64::max)
}

/// L² norm over ℝ³ of `(1 + |y|²)⁻¹`.
fn weighted_product_constant() -> f64 {
    // y = tan θ maps [0, π/2) onto [0, ∞)
    let sq = quadrature::integrate(GL_POINTS, 0.0, std::f64::consts::FRAC_PI_2, |th| {
        let r = th.tan();
        let sec2 = 1.0 / th.cos().powi(2);
        4.0 * std::f64::consts::PI * r * r / (1.0 + r * r).powi(2) * sec2
    });
    sq.sqrt()
}

/// C_G, C_K and C_s by quadrature, each clamped below at 1.
pub fn compute_constants(p: &HeatParams, _grid: &GridSpec, c_n: u32) -> Result<SchemeConstants> {
    if c_n < 1 {
        return Err(Error::InvalidArgument("c_n must be a positive integer".into()));
    }
    let raw = RawConstants {
        heat_mass: heat_kernel_l1(p),
        laplace_gradient: laplace_gradient_constant(),
        weighted_product: weighted_product_constant(),
    };
    Ok(SchemeConstants {
        c_g: raw.heat_mass.max(1.0),
        c_k: raw.laplace_gradient.max(1.0),
        c_s: raw.weighted_product.max(1.0),
        c_n,
        raw,
    })
}
