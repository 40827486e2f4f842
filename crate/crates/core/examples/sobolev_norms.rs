//! Sobolev and sup norms of the built-in initial fields.

use navier_picard::cli::{abc_flow, gaussian_vortex, taylor_green};
use navier_picard::control::hm_cm_norm;
use navier_picard::fields::{cm_sup_norm, divergence, sobolev_norm, GridSpec};

fn main() -> navier_picard::Result<()> {
    let periodic = GridSpec::periodic_2pi(32)?;
    let free = GridSpec::new(32, 8.0)?;
    let fields = [
        ("taylor_green", taylor_green(periodic)),
        ("abc_flow", abc_flow(periodic)),
        ("gaussian_vortex", gaussian_vortex(free)?),
    ];
    println!("{:>16} {:>3} {:>12} {:>12} {:>12} {:>10}", "field", "m", "H^m", "C^m", "max", "|div|");
    for (name, v) in &fields {
        let div = divergence(v)?.l2_norm();
        for m in 0..=3 {
            println!(
                "{name:>16} {m:>3} {:>12.6} {:>12.6} {:>12.6} {div:>10.2e}",
                sobolev_norm(v, m)?,
                cm_sup_norm(v, m)?,
                hm_cm_norm(v, m)?
            );
        }
    }
    Ok(())
}
