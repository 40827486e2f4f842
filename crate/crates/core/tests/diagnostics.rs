use approx::assert_relative_eq;
use navier_picard::cli::{perturbed, taylor_green, RunConfig};
use navier_picard::diagnostics::*;
use navier_picard::fields::*;
use navier_picard::scheme::{local_solve, run_global, SchemeConfig, StepPolicy};
use proptest::prelude::*;

#[test]
fn fit_examples() {
    let f = fit_bound(&[1.25; 9], BoundKind::Uniform).unwrap();
    assert_eq!((f.slope, f.max_residual, f.relative_residual()), (0.0, 0.0, 0.0));
    let s: Vec<f64> = (1..=20).map(|l| 3.0 - 0.125 * l as f64).collect();
    let f = fit_bound(&s, BoundKind::Linear).unwrap();
    assert_relative_eq!(f.intercept, 3.0, epsilon = 1e-10);
    assert_relative_eq!(f.slope, -0.125, epsilon = 1e-10);
    assert!(f.max_residual >= 0.0 && f.max_residual <= 1e-12);
    let kink: Vec<f64> = (1..=10).map(|l| if l <= 5 { 0.0 } else { (l - 5) as f64 }).collect();
    let f = fit_bound(&kink, BoundKind::Linear).unwrap();
    assert!(f.relative_residual() > 0.1);
}

fn radial(n: usize, l: f64, f: impl Fn(f64) -> f64) -> VectorField {
    let g = GridSpec::new(n, l).unwrap();
    let s = ScalarField::from_fn(g, |p| f((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()));
    VectorField::new([s.clone(), s.scale(-2.0), s.scale(0.5)]).unwrap()
}

#[test]
fn decay_inheritance_examples() {
    let fit = DecayFit::new(4.0, 30.0);
    let empty = decay_inheritance(&[], 2.0, &fit).unwrap();
    assert!(empty.pass && empty.increments.is_empty());
    let zero = VectorField::zeros(GridSpec::new(16, 8.0).unwrap());
    assert!(decay_inheritance(&[zero.clone(), zero], 2.0, &fit).unwrap().pass);

    // L = 40 keeps 1/(1+r⁴) below 1e-6 of its peak on the boundary layer
    let quartic = radial(64, 40.0, |r| 1.0 / (1.0 + r.powi(4)));
    let report = decay_inheritance(&[quartic], 2.0, &fit).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.increments[0].exponents.iter().all(|p| (p.unwrap() - 4.0).abs() < 0.2));

    let slow = radial(64, 40.0, |r| 1.0 / (1.0 + r));
    let report = decay_inheritance(&[slow.clone()], 2.0, &fit).unwrap();
    assert!(!report.pass);
    assert!(report.increments[0].exponents.iter().all(|p| p.is_none()));
    let unchecked = decay_inheritance(&[slow], 2.0, &fit.without_free_space_check()).unwrap();
    assert!(!unchecked.pass);
    assert!(unchecked.increments[0].exponents.iter().all(|p| p.unwrap() < 1.5));
}

#[test]
fn leray_sup_examples() {
    let g = GridSpec::periodic_2pi(16).unwrap();
    assert_eq!(leray_sup(&VectorField::zeros(g)).unwrap(), 0.0);
    assert!(leray_sup(&VectorField::from_fn(g, |p| [0.0, p[0].cos(), 0.0])).unwrap() <= 1e-14);
    assert!(leray_sup(&taylor_green(GridSpec::periodic_2pi(32).unwrap())).unwrap() > 0.1);
}

#[test]
fn residual_order_on_taylor_green() {
    let h = taylor_green(GridSpec::periodic_2pi(16).unwrap());
    let residual = |m: usize| {
        let mut cfg = SchemeConfig::new(*h.grid());
        cfg.nodes = m;
        let s = local_solve(&h, &cfg, 0.05).unwrap();
        nse_residual(&s.trajectory, &cfg, 0.05).unwrap()
    };
    let ratio = residual(8) / residual(16);
    assert!((3.2..4.8).contains(&ratio), "{ratio}");
}

#[test]
fn contraction_table_of_zero_run() {
    let mut cfg = SchemeConfig::new(GridSpec::periodic_2pi(8).unwrap());
    cfg.step_policy = StepPolicy::Fixed { rho: 0.1 };
    let ledger = run_global(&VectorField::zeros(cfg.grid), 2, &cfg).unwrap();
    let table = contraction_table(&ledger.steps);
    assert!(table.rows.is_empty());
    assert_eq!(table.first_increments.len(), 2);
    assert!(table.first_increments.iter().all(|r| r.converged_at_first && r.pass));
    assert!(table.all_pass());
}

#[test]
fn contraction_table_rows() {
    let mut cfg = SchemeConfig::new(GridSpec::periodic_2pi(16).unwrap());
    cfg.nodes = 8;
    let ledger = run_global(&taylor_green(cfg.grid), 2, &cfg).unwrap();
    let table = contraction_table(&ledger.steps);
    let expected: usize = ledger.steps.iter().map(|r| r.ratios.len()).sum();
    assert_eq!(table.rows.len(), expected);
    assert!(table.rows.iter().all(|r| r.k >= 2 && r.pass));
    assert!(table.max_ratio() <= CONTRACTION_BOUND);

    let mut csv = Vec::new();
    write_contraction_csv(&table, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "l,k,ratio,squared_ratio,pass");
    assert_eq!(lines.count(), table.rows.len());

    let mut csv = Vec::new();
    write_steps_csv(&ledger.steps, &mut csv).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_slice());
    assert_eq!(reader.headers().unwrap().get(0), Some("l"));
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    let rho: f64 = rows[0][1].parse().unwrap();
    assert_eq!(rho.to_bits(), ledger.steps[0].rho.to_bits());
}

#[test]
fn report_json_schema() {
    let mut cfg = SchemeConfig::new(GridSpec::periodic_2pi(8).unwrap());
    cfg.nodes = 4;
    let ledger = run_global(&taylor_green(cfg.grid), 2, &cfg).unwrap();
    let report = RunReport {
        config: RunConfig::default(),
        steps: ledger.steps.clone(),
        fits: vec![fit_bound(&[1.0, 2.0], BoundKind::Linear).unwrap()],
        pass_flags: [("contraction".to_string(), true)].into_iter().collect(),
    };
    let json = to_json_string(&report).unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["config", "fits", "pass_flags", "steps"]);
    let back: RunReport<RunConfig> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn leray_sup_is_quadratic(seed in 0u64..10_000, k in -3i32..4, a in -3.0f64..3.0) {
        let v = perturbed(&VectorField::zeros(GridSpec::periodic_2pi(8).unwrap()), 1.0, seed).unwrap();
        let base = leray_sup(&v).unwrap();
        let b = 2f64.powi(k);
        prop_assert_eq!(leray_sup(&v.scale(b)).unwrap(), b * b * base);
        prop_assert_eq!(leray_sup(&v.scale(-b)).unwrap(), b * b * base);
        prop_assert!((leray_sup(&v.scale(a)).unwrap() - a * a * base).abs() <= 1e-12 * (1.0 + a * a) * base);
    }

    #[test]
    fn fit_is_deterministic(series in prop::collection::vec(-1e3f64..1e3, 2..40), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut idx: Vec<usize> = (0..series.len()).collect();
        idx.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let shuffled: Vec<f64> = idx.iter().map(|&i| series[i]).collect();
        let mut restored = vec![0.0; series.len()];
        for (s, &i) in shuffled.iter().zip(&idx) {
            restored[i] = *s;
        }
        for kind in [BoundKind::Uniform, BoundKind::Linear, BoundKind::Sqrt] {
            prop_assert_eq!(fit_bound(&series, kind).unwrap(), fit_bound(&restored, kind).unwrap());
        }
    }
}
