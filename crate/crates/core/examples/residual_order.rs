//! Second-order decrease of the equation residual as the node count doubles.

use navier_picard::cli::{abc_flow, taylor_green};
use navier_picard::diagnostics::nse_residual;
use navier_picard::fields::GridSpec;
use navier_picard::scheme::{local_solve, SchemeConfig};

fn main() -> navier_picard::Result<()> {
    let g = GridSpec::periodic_2pi(16)?;
    let rho = 0.01;
    for (name, h) in [("taylor_green", taylor_green(g)), ("abc_flow", abc_flow(g))] {
        let mut prev = None;
        for m in [4, 8, 16, 32] {
            let mut cfg = SchemeConfig::new(g);
            cfg.nodes = m;
            let s = local_solve(&h, &cfg, rho)?;
            let res = nse_residual(&s.trajectory, &cfg, rho)?;
            let ratio = prev.map_or(String::new(), |p: f64| format!("  ratio {:.3}", p / res));
            println!("{name:>13} M={m:<3} residual {res:.3e}{ratio}");
            prev = Some(res);
        }
    }
    Ok(())
}
