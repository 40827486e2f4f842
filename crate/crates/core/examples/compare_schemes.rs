//! Star and nonstar sub-iterations converge to the same local solution.

use navier_picard::cli::{abc_flow, taylor_green};
use navier_picard::fields::{c0_traj_norm, GridSpec};
use navier_picard::scheme::{local_solve, local_solve_nonstar, SchemeConfig};

fn main() -> navier_picard::Result<()> {
    let g = GridSpec::periodic_2pi(16)?;
    let mut cfg = SchemeConfig::new(g);
    cfg.nodes = 8;
    for (name, h) in [("taylor_green", taylor_green(g)), ("abc_flow", abc_flow(g))] {
        for rho in [1e-3, 1e-2] {
            let star = local_solve(&h, &cfg, rho)?;
            let nonstar = local_solve_nonstar(&h, &cfg, rho)?;
            let d = c0_traj_norm(&star.trajectory.sub(&nonstar.trajectory)?, 2)?;
            println!(
                "{name:>13} rho {rho:.0e}: star {} iters, nonstar {} iters, H2 distance {d:.2e}",
                star.n_subiter, nonstar.n_subiter
            );
        }
    }
    Ok(())
}
