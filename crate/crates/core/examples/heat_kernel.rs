//! Heat propagation of a single Fourier mode and of a Gaussian bump.

use navier_picard::fields::{GridSpec, ScalarField};
use navier_picard::kernels::{heat_propagate, HeatParams};

fn main() -> navier_picard::Result<()> {
    let g = GridSpec::periodic_2pi(32)?;
    let p = HeatParams::new(1.0, 0.1)?;
    let mode = ScalarField::from_fn(g, |x| (2.0 * x[0]).sin() * x[1].cos());
    println!("{:>6} {:>14} {:>14} {:>10}", "dt", "sup", "exact", "rel err");
    for dt in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let out = heat_propagate(&mode, &p, dt)?;
        // |ξ|² = 5 for this mode
        let exact = mode.scale((-5.0 * p.diffusivity() * dt).exp());
        let err = out.max_abs_diff(&exact) / exact.sup_abs();
        println!("{dt:>6} {:>14.8e} {:>14.8e} {err:>10.2e}", out.sup_abs(), exact.sup_abs());
    }

    // a Gaussian keeps its mass and spreads with variance 2ρν t per axis
    let g = GridSpec::new(64, 16.0)?;
    let bump = ScalarField::from_fn(g, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp());
    let spread = heat_propagate(&bump, &HeatParams::new(1.0, 1.0)?, 1.5)?;
    let mass = |f: &ScalarField| f.values().iter().sum::<f64>() * g.cell_volume();
    println!("mass before {:.12}, after {:.12}", mass(&bump), mass(&spread));
    println!("peak before {:.6}, after {:.6} (expected {:.6})", bump.sup_abs(), spread.sup_abs(), 4f64.powf(-1.5));
    Ok(())
}
