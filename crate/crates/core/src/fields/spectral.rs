use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::{Fft3, GridSpec, ScalarField};

/// Unnormalized Fourier coefficients of a scalar field; the inverse
/// transform carries the 1/n³ factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn forward(f: &ScalarField) -> SpectralField {
        let mut coeffs: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Fft3::get(f.grid().n()).forward(&mut coeffs);
        SpectralField { grid: *f.grid(), coeffs }
    }

    pub(crate) fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> SpectralField {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid, coeffs }
    }

    pub fn zeros(grid: GridSpec) -> SpectralField {
        SpectralField {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Real part of the inverse transform.
    pub fn to_real(&self) -> ScalarField {
        self.clone().into_real()
    }

    pub fn into_real(mut self) -> ScalarField {
        Fft3::get(self.grid.n()).inverse(&mut self.coeffs);
        ScalarField::from_vec(self.grid, self.coeffs.iter().map(|c| c.re).collect())
    }

    /// Mixed partial derivative `D^α` with spectral wavenumbers.
    pub fn derivative(&self, alpha: [u32; 3]) -> SpectralField {
        let g = self.grid;
        let n = g.n();
        let factor = |q: usize, p: u32| -> Complex64 { (Complex64::i() * g.deriv_wavenumber(q)).powu(p) };
        let fx: Vec<Complex64> = (0..n).map(|q| factor(q, alpha[0])).collect();
        let fy: Vec<Complex64> = (0..n).map(|q| factor(q, alpha[1])).collect();
        let fz: Vec<Complex64> = (0..n).map(|q| factor(q, alpha[2])).collect();
        let mut out = self.clone();
        out.coeffs.par_chunks_mut(n * n).enumerate().for_each(|(a, plane)| {
            for b in 0..n {
                let fab = fx[a] * fy[b];
                for c in 0..n {
                    plane[b * n + c] *= fab * fz[c];
                }
            }
        });
        out
    }

    /// First derivative along `axis`.
    pub fn partial(&self, axis: usize) -> SpectralField {
        let mut alpha = [0; 3];
        alpha[axis] = 1;
        self.derivative(alpha)
    }

    /// Multiply every coefficient by a real per-mode factor.
    pub fn scale_by(&mut self, factors: &[f64]) {
        self.coeffs
            .par_iter_mut()
            .zip(factors.par_iter())
            .for_each(|(c, &f)| *c *= f);
    }

    /// Zero every mode outside the 2/3-rule band.
    pub fn dealias(&mut self, mask: &[bool]) {
        self.coeffs
            .par_iter_mut()
            .zip(mask.par_iter())
            .for_each(|(c, &keep)| {
                if !keep {
                    *c = Complex64::default();
                }
            });
    }

    /// Largest |c(ξ) - conj(c(-ξ))| relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let neg = |q: usize| (n - q) % n;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let z = self.coeffs[self.grid.index(a, b, c)];
                    let w = self.coeffs[self.grid.index(neg(a), neg(b), neg(c))];
                    worst = worst.max((z - w.conj()).norm());
                    scale = scale.max(z.norm());
                }
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}
