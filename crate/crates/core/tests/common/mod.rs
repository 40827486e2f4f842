//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use navier_picard::fields::{GridSpec, ScalarField, VectorField};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// 3D FFT by axis-wise 1D transforms (unnormalized in both directions).
pub fn fft3(data: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut line = vec![Complex64::default(); n];
    for axis in 0..3 {
        let stride = n.pow(2 - axis as u32);
        for a in 0..n {
            for b in 0..n {
                let base = match axis {
                    0 => a * n + b,
                    1 => a * n * n + b,
                    _ => (a * n + b) * n,
                };
                for (t, x) in line.iter_mut().enumerate() {
                    *x = data[base + t * stride];
                }
                fft.process(&mut line);
                for (t, x) in line.iter().enumerate() {
                    data[base + t * stride] = *x;
                }
            }
        }
    }
}

/// Smooth part `∂_i[-erf(r/a) / (4π r)]` of the kernel.
pub fn smooth_laplace_gradient(z: [f64; 3], i: usize, a: f64) -> f64 {
    let r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    if r2 == 0.0 {
        return 0.0;
    }
    let r = r2.sqrt();
    let radial = erf(r / a) / r2 - 2.0 / (a * std::f64::consts::PI.sqrt()) * (-(r2 / (a * a))).exp() / r;
    z[i] / r * radial / (4.0 * std::f64::consts::PI)
}

pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x < 3.0 {
        // Maclaurin series
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        for k in 1..200 {
            term *= -x2 / k as f64;
            let add = term / (2 * k + 1) as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        // Lentz continued fraction for erfc
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for k in 1..200 {
            let an = k as f64 / 2.0;
            d = x + an * d;
            d = 1.0 / d;
            c = x + an / c;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        1.0 - (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
    }
}

/// Linear convolution `h³ Σ_y k(x - y) q(y)` over the grid, evaluated by FFT
/// on a grid zero-padded to twice the size.
pub fn padded_convolution(q: &ScalarField, kernel: impl Fn([f64; 3]) -> f64) -> ScalarField {
    let g = q.grid();
    let n = g.n();
    let m = 2 * n;
    let h = g.spacing();
    let mut qp = vec![Complex64::default(); m * m * m];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                qp[(a * m + b) * m + c] = Complex64::new(q.values()[g.index(a, b, c)], 0.0);
            }
        }
    }
    let wrap = |t: usize| if t < n { t as f64 } else { t as f64 - m as f64 };
    let mut kp = vec![Complex64::default(); m * m * m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let z = [wrap(a) * h, wrap(b) * h, wrap(c) * h];
                kp[(a * m + b) * m + c] = Complex64::new(kernel(z), 0.0);
            }
        }
    }
    fft3(&mut qp, m, false);
    fft3(&mut kp, m, false);
    for (x, k) in qp.iter_mut().zip(&kp) {
        *x *= k;
    }
    fft3(&mut qp, m, true);
    let scale = h.powi(3) / (m * m * m) as f64;
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                out[g.index(a, b, c)] = qp[(a * m + b) * m + c].re * scale;
            }
        }
    }
    ScalarField::new(*g, out).unwrap()
}

/// `(∂_i K₃ ⋆ q)(x)` in free space for an analytic, rapidly decaying `q`.
///
/// The kernel is split as `-1/(4πr) = -erf(r/a)/(4πr) - erfc(r/a)/(4πr)`.
/// The smooth part is convolved on the grid; the short part acts on
/// `∂_i q` through its moments `∫K_s = -a²/4`, `∫K_s r²/6 = -a⁴/32` and
/// `∫K_s r⁴/120 = -a⁶/384`.
pub fn split_kernel_convolution(grid: GridSpec, q: impl Fn([f64; 3]) -> f64 + Sync, i: usize, a: f64) -> ScalarField {
    let sampled = ScalarField::from_fn(grid, &q);
    let long = padded_convolution(&sampled, |z| smooth_laplace_gradient(z, i, a));
    let d = 1e-3;
    let di = |p: [f64; 3]| {
        let at = |t: f64| {
            let mut x = p;
            x[i] += t;
            q(x)
        };
        (8.0 * (at(d) - at(-d)) - (at(2.0 * d) - at(-2.0 * d))) / (12.0 * d)
    };
    let e = 1e-2;
    let lap = |f: &dyn Fn([f64; 3]) -> f64, p: [f64; 3]| {
        let mut s = -6.0 * f(p);
        for ax in 0..3 {
            for sgn in [-1.0, 1.0] {
                let mut x = p;
                x[ax] += sgn * e;
                s += f(x);
            }
        }
        s / (e * e)
    };
    let lap1 = |p: [f64; 3]| lap(&di, p);
    let lap2 = |p: [f64; 3]| lap(&lap1, p);
    let short = ScalarField::from_fn(grid, |p| {
        -a * a / 4.0 * di(p) - a.powi(4) / 32.0 * lap1(p) - a.powi(6) / 384.0 * lap2(p)
    });
    long.add(&short).unwrap()
}

/// `q = Σ_{j,m} ∂_j v_m ∂_m v_j` from analytic gradients `grad[m][j] = ∂_j v_m`.
pub fn q_from_gradients(grid: GridSpec, grad: impl Fn([f64; 3]) -> [[f64; 3]; 3]) -> ScalarField {
    ScalarField::from_fn(grid, |p| {
        let d = grad(p);
        let mut s = 0.0;
        for j in 0..3 {
            for m in 0..3 {
                s += d[m][j] * d[j][m];
            }
        }
        s
    })
}

pub fn relative_sup_error(a: &ScalarField, b: &ScalarField) -> f64 {
    a.max_abs_diff(b) / b.sup_abs()
}

pub fn sin_x(grid: GridSpec) -> VectorField {
    VectorField::from_fn(grid, |p| [p[0].sin(), 0.0, 0.0])
}

/// Independent radial quadrature: composite Simpson on a mapped interval.
pub fn simpson(n: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `∫_{S²} w(n) dΩ` by the midpoint rule in (θ, φ).
pub fn sphere_midpoint(w: impl Fn([f64; 3]) -> f64) -> f64 {
    let (nt, np) = (800, 200);
    let (dt, dp) = (PI / nt as f64, 2.0 * PI / np as f64);
    let mut s = 0.0;
    for a in 0..nt {
        let t = (a as f64 + 0.5) * dt;
        for b in 0..np {
            let p = (b as f64 + 0.5) * dp;
            s += w([t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]) * t.sin() * dt * dp;
        }
    }
    s
}

pub struct OracleConstants {
    pub heat_mass: f64,
    pub laplace_gradient: f64,
    pub weighted_product: f64,
}

/// Radial-quadrature values of the three kernel constants.
pub fn oracle_constants() -> OracleConstants {
    // |∂_i K₃| = |n_i| / (4π r²): the ball part is ∫₀¹ dr ∫|n_i| / 4π, the
    // exterior part ∫₁^∞ r^{-2} dr ∫ n_i² / 16π²
    let inner = sphere_midpoint(|n| n[2].abs()) / (4.0 * PI);
    let outer = sphere_midpoint(|n| n[2] * n[2]) / (16.0 * PI * PI);
    let c_k = inner + outer.sqrt();
    // r = t / (1 - t)
    let c_s = simpson(4000, 0.0, 1.0 - 1e-9, |t| {
        let r = t / (1.0 - t);
        4.0 * PI * r * r / (1.0 + r * r).powi(2) / (1.0 - t).powi(2)
    })
    .sqrt();
    // heat kernel mass in the variable s = r / sqrt(4ρν τ), the same for every τ
    let mass = simpson(2000, 0.0, 12.0, |s| 4.0 * PI * s * s * PI.powf(-1.5) * (-s * s).exp());
    OracleConstants { heat_mass: mass, laplace_gradient: c_k, weighted_product: c_s }
}
