//! Fitted algebraic decay of closed forms and of Picard increments.

use navier_picard::cli::gaussian_vortex;
use navier_picard::diagnostics::decay_inheritance;
use navier_picard::fields::{boundary_ratio, decay_exponent, DecayFit, GridSpec, ScalarField};
use navier_picard::scheme::{local_solve, SchemeConfig};

fn main() -> navier_picard::Result<()> {
    let g = GridSpec::new(64, 32.0)?;
    let fit = DecayFit::new(4.0, 28.0).without_free_space_check();
    let radius = |x: [f64; 3]| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    for (name, f) in [
        ("1/(1+r^2)", ScalarField::from_fn(g, |x| 1.0 / (1.0 + radius(x).powi(2)))),
        ("1/(1+r^4)", ScalarField::from_fn(g, |x| 1.0 / (1.0 + radius(x).powi(4)))),
        ("exp(-r^2)", ScalarField::from_fn(g, |x| (-radius(x).powi(2)).exp())),
    ] {
        println!("{name:>10}: exponent {:.3}, boundary ratio {:.1e}", decay_exponent(&f, &fit)?, boundary_ratio(&f));
    }

    let mut cfg = SchemeConfig::new(GridSpec::new(32, 16.0)?);
    cfg.nodes = 8;
    let h = gaussian_vortex(cfg.grid)?;
    let s = local_solve(&h, &cfg, 1e-2)?;
    let report = decay_inheritance(&s.final_increments, 2.0, &DecayFit::new(2.0, 14.0))?;
    for row in &report.increments {
        let ratios = row.boundary_ratios.map(|b| format!("{b:.1e}")).join(" ");
        println!("increment k={}: exponents {:?}, boundary ratios {ratios}", row.k, row.exponents);
    }
    println!("inheritance check passes: {}", report.pass);
    Ok(())
}
