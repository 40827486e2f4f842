//! The pressure-gradient term of a Taylor-Green vortex against its closed form.

use navier_picard::cli::taylor_green;
use navier_picard::diagnostics::leray_sup;
use navier_picard::fields::{GridSpec, VectorField};
use navier_picard::kernels::{convection_source, leray_source};

fn main() -> navier_picard::Result<()> {
    let g = GridSpec::periodic_2pi(32)?;
    let v = taylor_green(g);
    let leray = leray_source(&v, true)?;
    // -∇p with p = (cos 2x + cos 2y)(cos 2z + 2) / 16
    let exact = VectorField::from_fn(g, |[x, y, z]| {
        let c = (2.0 * z).cos() + 2.0;
        [
            (2.0 * x).sin() * c / 8.0,
            (2.0 * y).sin() * c / 8.0,
            ((2.0 * x).cos() + (2.0 * y).cos()) * (2.0 * z).sin() / 8.0,
        ]
    });
    println!("sup |Leray term|      {:.6}", leray.sup_abs());
    println!("sup error vs closed form {:.2e}", leray.max_abs_diff(&exact));
    println!("leray_sup diagnostic   {:.6}", leray_sup(&v)?);
    println!("sup |(v.grad) v|       {:.6}", convection_source(&v, true)?.sup_abs());
    for a in [0.5, 1.0, 2.0] {
        println!("amplitude {a}: leray_sup {:.6}", leray_sup(&v.scale(a))?);
    }
    Ok(())
}
