//! Short runs under every control mode, with norms after each step.

use navier_picard::cli::taylor_green;
use navier_picard::control::{hm_cm_norm, ControlMode};
use navier_picard::fields::GridSpec;
use navier_picard::scheme::{run_global, SchemeConfig, StepPolicy};

fn main() -> navier_picard::Result<()> {
    let g = GridSpec::periodic_2pi(16)?;
    let h = taylor_green(g);
    let c = 2.0 * hm_cm_norm(&h, 2)?;
    let modes = [
        ControlMode::None,
        ControlMode::Simple { c },
        ControlMode::NegFirstIncrement,
        ControlMode::Consumption { c },
        ControlMode::Foresight { c, eps: 0.5 },
    ];
    for mode in modes {
        let mut cfg = SchemeConfig::new(g);
        cfg.nodes = 8;
        cfg.control = mode;
        if let ControlMode::Foresight { .. } = mode {
            cfg.step_policy = StepPolicy::Foresight { c_kp: 1.0 };
        }
        let ledger = run_global(&h, 5, &cfg)?;
        println!("{}:", mode.name());
        for r in &ledger.steps {
            println!(
                "  l={} rho {:.2e} |v^r|_H2 {:.4} |r|_H2 {:.4} leray {:.4} div {:.1e}",
                r.l, r.rho, r.hm_norm_end, r.control_hm_norm, r.leray_sup, r.div_norm
            );
        }
    }
    Ok(())
}
