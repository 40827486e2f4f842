//! Kernel constants and the step-size factor they imply.

use navier_picard::fields::GridSpec;
use navier_picard::kernels::{compute_constants, HeatParams};
use navier_picard::scheme::step_size_theorem;

fn main() -> navier_picard::Result<()> {
    let g = GridSpec::periodic_2pi(8)?;
    let k = compute_constants(&HeatParams::new(1.0, 1.0)?, &g, 16)?;
    println!("raw: heat mass {:.12}", k.raw.heat_mass);
    println!("raw: Laplace gradient {:.6}", k.raw.laplace_gradient);
    println!("raw: weighted product {:.12}", k.raw.weighted_product);
    println!("clamped: C_G {} C_K {} C_s {:.12} c_n {}", k.c_g, k.c_k, k.c_s, k.c_n);
    println!();
    println!("{:>10} {:>14}", "C^(l-1)", "rho");
    for c in [0.0, 1.0, 10.0, 100.0, 1000.0] {
        println!("{c:>10} {:>14.6e}", step_size_theorem(c, &k)?);
    }
    Ok(())
}
