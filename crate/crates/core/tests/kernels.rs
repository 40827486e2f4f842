mod common;

use std::f64::consts::PI;

use navier_picard::cli::{perturbed, taylor_green};
use navier_picard::diagnostics::leray_sup;
use navier_picard::fields::*;
use navier_picard::kernels::*;
use common::{oracle_constants, OracleConstants};
use navier_picard::Error;
use proptest::prelude::*;

fn sine(g: GridSpec) -> VectorField {
    VectorField::from_fn(g, |p| [p[0].sin(), 0.0, 0.0])
}

fn relative(a: &VectorField, b: &VectorField) -> f64 {
    a.max_abs_diff(b) / b.sup_abs()
}

#[test]
fn heat_single_mode() {
    let g = GridSpec::periodic_2pi(32).unwrap();
    let p = HeatParams::new(0.5, 0.4).unwrap();
    let out = heat_propagate(&sine(g), &p, 0.5).unwrap();
    assert!(relative(&out, &sine(g).scale((-0.1f64).exp())) <= 1e-12);
}

#[test]
fn heat_of_constant_and_zero_time() {
    let g = GridSpec::new(16, 2.0).unwrap();
    let p = HeatParams::new(1.0, 1.0).unwrap();
    let c = VectorField::constant(g, [1.5, -2.0, 0.25]);
    assert!(heat_propagate(&c, &p, 3.0).unwrap().max_abs_diff(&c) <= 1e-14);
    let v = perturbed(&VectorField::zeros(g), 1.0, 7).unwrap();
    assert_eq!(heat_propagate(&v, &p, 0.0).unwrap(), v);
    assert!(matches!(heat_propagate(&v, &p, -1e-3), Err(Error::InvalidArgument(_))));
}

#[test]
fn heat_params_validation() {
    for (nu, rho) in [(0.0, 1.0), (1.0, -1.0), (f64::NAN, 1.0), (1.0, f64::INFINITY)] {
        assert!(matches!(HeatParams::new(nu, rho), Err(Error::InvalidArgument(_))));
    }
}

#[test]
fn gaussian_variance_grows_by_twice_diffusivity_dt() {
    let g = GridSpec::new(64, 16.0).unwrap();
    let gaussian = |var: f64| {
        move |p: [f64; 3]| {
            let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            (2.0 * PI * var).powf(-1.5) * (-r2 / (2.0 * var)).exp()
        }
    };
    let var = 2.25;
    let p = HeatParams::new(0.8, 1.25).unwrap();
    let dt = 0.5;
    let out = heat_propagate(&ScalarField::from_fn(g, gaussian(var)), &p, dt).unwrap();
    let exact = ScalarField::from_fn(g, gaussian(var + 2.0 * p.diffusivity() * dt));
    assert!(out.max_abs_diff(&exact) <= 1e-6);
    assert!(out.max_abs_diff(&exact) <= 1e-12);
}

#[test]
fn duhamel_zero_and_node_count() {
    let g = GridSpec::new(8, 1.0).unwrap();
    let p = HeatParams::new(1.0, 1.0).unwrap();
    let zeros = vec![VectorField::zeros(g); 5];
    let times: Vec<f64> = (0..5).map(|j| j as f64 / 4.0).collect();
    assert_eq!(duhamel_step(&times, &zeros, &p, 1.0).unwrap(), VectorField::zeros(g));
    assert!(matches!(
        duhamel_step(&[0.0], &zeros[..1], &p, 1.0),
        Err(Error::InsufficientNodes(1))
    ));
}

#[test]
fn duhamel_identity_limit() {
    let g = GridSpec::periodic_2pi(16).unwrap();
    let p = HeatParams::new(1e-6, 1e-7).unwrap();
    let s = VectorField::from_fn(g, |x| [x[1].cos(), 2.0, (x[0] + x[2]).sin()]);
    let times: Vec<f64> = (0..=16).map(|j| 3.0 + j as f64 / 32.0).collect();
    let sources = vec![s.clone(); times.len()];
    let out = duhamel_step(&times, &sources, &p, 3.5).unwrap();
    assert!(out.max_abs_diff(&s.scale(0.5)) <= 1e-10);
}

fn duhamel_sine_error(m: usize) -> f64 {
    let g = GridSpec::periodic_2pi(16).unwrap();
    let p = HeatParams::new(1.0, 1.0).unwrap();
    let times: Vec<f64> = (0..=m).map(|j| j as f64 / m as f64).collect();
    let sources = vec![sine(g); m + 1];
    let out = duhamel_step(&times, &sources, &p, 1.0).unwrap();
    out.max_abs_diff(&sine(g).scale(1.0 - (-1.0f64).exp()))
}

#[test]
fn duhamel_single_mode_second_order() {
    let (e16, e32) = (duhamel_sine_error(16), duhamel_sine_error(32));
    // trapezoid error of ∫₀¹ e^{s-1} ds is (1 - e^{-1}) / (12 M²) to leading order
    assert!(e16 <= 1.1 * (1.0 - (-1.0f64).exp()) / (12.0 * 256.0));
    assert!((3.9..4.1).contains(&(e16 / e32)), "ratio {}", e16 / e32);
}

#[test]
fn leray_annihilates_shears_and_constants() {
    let g = GridSpec::periodic_2pi(16).unwrap();
    for v in [
        VectorField::zeros(g),
        VectorField::constant(g, [1.0, -2.0, 3.0]),
        VectorField::from_fn(g, |p| [p[1].sin(), 0.0, 0.0]),
        VectorField::from_fn(g, |p| [0.0, (2.0 * p[2]).cos(), p[0].sin()]),
    ] {
        for dealias in [false, true] {
            assert!(leray_source(&v, dealias).unwrap().sup_abs() <= 1e-14);
        }
    }
}

#[test]
fn convection_examples() {
    let g = GridSpec::periodic_2pi(16).unwrap();
    assert_eq!(convection_source(&VectorField::zeros(g), true).unwrap().sup_abs(), 0.0);
    let c = VectorField::constant(g, [0.3, 1.0, -2.0]);
    assert!(convection_source(&c, true).unwrap().sup_abs() <= 1e-14);
    let exact = VectorField::from_fn(g, |p| [-p[0].sin() * p[0].cos(), 0.0, 0.0]);
    for dealias in [false, true] {
        assert!(convection_source(&sine(g), dealias).unwrap().max_abs_diff(&exact) <= 1e-13);
    }
}

/// Taylor–Green pressure `p = (cos 2x + cos 2y)(cos 2z + 2) / 16`; the Leray
/// term equals `-∇p`.
fn taylor_green_leray(g: GridSpec) -> VectorField {
    VectorField::from_fn(g, |[x, y, z]| {
        let zz = (2.0 * z).cos() + 2.0;
        [
            (2.0 * x).sin() * zz / 8.0,
            (2.0 * y).sin() * zz / 8.0,
            ((2.0 * x).cos() + (2.0 * y).cos()) * (2.0 * z).sin() / 8.0,
        ]
    })
}

#[test]
fn leray_taylor_green_closed_form() {
    let g = GridSpec::periodic_2pi(32).unwrap();
    let exact = taylor_green_leray(g);
    for dealias in [false, true] {
        let l = leray_source(&taylor_green(g), dealias).unwrap();
        assert!(relative(&l, &exact) <= 1e-12);
    }
    let sup = leray_sup(&taylor_green(g)).unwrap();
    assert!((sup - exact.sup_abs()).abs() <= 1e-3 * exact.sup_abs());
}

#[test]
fn leray_matches_real_space_convolution() {
    // curl of ψ e_z with ψ = exp(-|x|²/2): v = (-y, x, 0) ψ; the box must be
    // wide enough that periodic images stay below the tolerance
    let g = GridSpec::new(96, 12.0).unwrap();
    let v = VectorField::from_fn(g, |[x, y, z]| {
        let a = (-(x * x + y * y + z * z) / 2.0).exp();
        [-y * a, x * a, 0.0]
    });
    let q = |p: [f64; 3]| {
        let [x, y, z] = p;
        let a = (-(x * x + y * y + z * z) / 2.0).exp();
        let da = |j: usize| -p[j] * a;
        let d = [
            [-y * da(0), -a - y * da(1), -y * da(2)],
            [a + x * da(0), x * da(1), x * da(2)],
            [0.0; 3],
        ];
        let mut s = 0.0;
        for j in 0..3 {
            for m in 0..3 {
                s += d[m][j] * d[j][m];
            }
        }
        s
    };
    let l = leray_source(&v, false).unwrap();
    let mut sup = 0.0f64;
    for i in 0..3 {
        let conv = common::split_kernel_convolution(g, q, i, 1.1 * g.spacing());
        let err = common::relative_sup_error(l.component(i), &conv);
        assert!(err <= 1e-3, "component {i}: {err:e}");
        sup = sup.max(conv.sup_abs());
    }
    assert!((leray_sup(&v).unwrap() - sup).abs() <= 1e-3 * sup);
}

#[test]
fn leray_has_zero_mean() {
    let g = GridSpec::new(16, 3.0).unwrap();
    let v = VectorField::from_fn(g, |p| [p[1].sin() * p[2], p[0].cos().powi(3), (p[0] * p[1]).sin()]);
    let l = leray_source(&v, false).unwrap();
    for i in 0..3 {
        assert!(l.component(i).mean().abs() <= 1e-14 * l.sup_abs());
    }
}

#[test]
fn constants_match_oracle() {
    let OracleConstants { heat_mass: mass, laplace_gradient: c_k, weighted_product: c_s } = oracle_constants();
    assert!((mass - 1.0).abs() <= 1e-9);
    assert!((c_k - 0.6628).abs() <= 1e-3);
    assert!((c_s - PI).abs() <= 1e-6);
    let g = GridSpec::periodic_2pi(8).unwrap();
    for (nu, rho) in [(1.0, 1.0), (1e-3, 0.05), (20.0, 3.0), (1e-6, 1e-6)] {
        let p = HeatParams::new(nu, rho).unwrap();
        let k = compute_constants(&p, &g, 16).unwrap();
        assert!((k.raw.heat_mass - mass).abs() <= 1e-6);
        assert_eq!(k.c_g, 1.0f64.max(k.raw.heat_mass));
        assert!((k.raw.laplace_gradient - c_k).abs() <= 1e-3);
        assert_eq!(k.c_k, 1.0);
        assert!((k.c_s - c_s).abs() <= 1e-6);
        assert!(k.c_g >= 1.0 && k.c_k >= 1.0 && k.c_s >= 1.0);
        assert_eq!(k.c_n, 16);
    }
    assert!(compute_constants(&HeatParams::new(1.0, 1.0).unwrap(), &g, 0).is_err());
}

fn solenoidal(seed: u64) -> VectorField {
    perturbed(&VectorField::zeros(GridSpec::periodic_2pi(16).unwrap()), 1.0, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semigroup(seed in 0u64..1000, a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let v = solenoidal(seed);
        let p = HeatParams::new(0.7, 1.3).unwrap();
        let two = heat_propagate(&heat_propagate(&v, &p, a).unwrap(), &p, b).unwrap();
        let one = heat_propagate(&v, &p, a + b).unwrap();
        prop_assert!(two.max_abs_diff(&one) <= 1e-12 * v.sup_abs());
    }

    #[test]
    fn mass_conservation(seed in 0u64..1000, c in -3.0f64..3.0, dt in 0.0f64..2.0) {
        let v = solenoidal(seed);
        let shifted = v.zip_with(&v, |x, _| x + c).unwrap();
        let out = heat_propagate(&shifted, &HeatParams::new(1.0, 1.0).unwrap(), dt).unwrap();
        for i in 0..3 {
            prop_assert!((out.component(i).mean() - shifted.component(i).mean()).abs() <= 1e-14 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn divergence_compatibility(seed in 0u64..1000, dealias in any::<bool>()) {
        let v = solenoidal(seed);
        let s = convection_source(&v, dealias).unwrap().add(&leray_source(&v, dealias).unwrap()).unwrap();
        let d = sobolev_norm(&divergence(&s).unwrap(), 0).unwrap();
        prop_assert!(d <= 1e-6 * sobolev_norm(&v, 2).unwrap().powi(2));
    }

    #[test]
    fn leray_quadratic(seed in 0u64..1000, a in -4.0f64..4.0) {
        let v = solenoidal(seed);
        let l = leray_source(&v, true).unwrap();
        let la = leray_source(&v.scale(a), true).unwrap();
        prop_assert!(la.max_abs_diff(&l.scale(a * a)) <= 1e-12 * (1.0 + a * a) * l.sup_abs());
    }
}
