//! Picard sub-iteration ratios on Taylor-Green at the theorem step and beyond.

use navier_picard::cli::taylor_green;
use navier_picard::fields::{sobolev_norm, GridSpec};
use navier_picard::kernels::{compute_constants, HeatParams};
use navier_picard::scheme::{local_solve, step_size_theorem, SchemeConfig};

fn main() -> navier_picard::Result<()> {
    let cfg = SchemeConfig::new(GridSpec::periodic_2pi(32)?);
    let h = taylor_green(cfg.grid);
    let k = compute_constants(&HeatParams::new(cfg.nu, 1.0)?, &cfg.grid, cfg.c_n)?;
    let rho0 = step_size_theorem(sobolev_norm(&h, cfg.m)?.powi(2), &k)?;
    for factor in [1.0, 1e2, 1e4] {
        let rho = rho0 * factor;
        let s = local_solve(&h, &cfg, rho)?;
        println!("rho = {rho:.3e}: {} sub-iterations, {:?}", s.n_subiter, s.status);
        for (k, (norm, ratio)) in s.increment_norms.iter().zip(std::iter::once(&f64::NAN).chain(&s.ratios)).enumerate() {
            println!("  k={:<2} |dv| {norm:.3e}  ratio {ratio:.3e}", k + 1);
        }
    }
    Ok(())
}
