use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::RunConfig;
use super::presets::{perturbed, preset_field};
use crate::control::ControlMode;
use crate::diagnostics::{
    contraction_table, fit_bound, to_json_string, write_contraction_csv, write_steps_csv, BoundFit, BoundKind,
    RunReport,
};
use crate::error::{Error, Result};
use crate::fields::{
    c0_traj_norm, read_checkpoint, sobolev_norm, write_checkpoint, Checkpoint, GridSpec, VectorField,
};
use crate::kernels::{compute_constants, HeatParams};
use crate::scheme::{
    foresight_step_size, local_solve, local_solve_nonstar, run_global_with, step_size_adaptive, step_size_theorem,
    RunLedger, SchemeConfig, StepPolicy, StepReport,
};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    /// A check the command performs did not pass, or an I/O failure.
    Failure = 1,
    Divergence = 2,
    Config = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_error(e: &Error) -> Exit {
        match e.root() {
            Error::Divergence { .. }
            | Error::NoContraction { .. }
            | Error::BlowUp { .. }
            | Error::NonstarInnerDivergence { .. } => Exit::Divergence,
            Error::Config(_) | Error::InvalidGrid(_) => Exit::Config,
            _ => Exit::Failure,
        }
    }
}

fn report_error(e: &Error, log: &mut dyn Write) -> Exit {
    let _ = writeln!(log, "error: {e}");
    Exit::from_error(e)
}

/// Initial data of a run: the preset plus the optional seeded perturbation.
pub fn initial_field(cfg: &RunConfig) -> Result<VectorField> {
    let base = preset_field(&cfg.preset()?, cfg.grid_spec()?)?;
    perturbed(&base, cfg.run.perturbation, cfg.run.seed)
}

/// ρ for a single local solve: the policy's value at `C = ‖h‖²_{H^m}`.
fn single_step_rho(h: &VectorField, cfg: &SchemeConfig) -> Result<f64> {
    let c_prev = sobolev_norm(h, cfg.m)?.powi(2);
    let c_prev = cfg.c_bound.map_or(c_prev, |c| c.max(c_prev));
    match cfg.step_policy {
        StepPolicy::Theorem => {
            let k = compute_constants(&HeatParams::new(cfg.nu, 1.0)?, &cfg.grid, cfg.c_n)?;
            step_size_theorem(c_prev, &k)
        }
        StepPolicy::Fixed { rho } => Ok(rho),
        StepPolicy::Adaptive { rho0 } => step_size_adaptive(h, cfg, rho0),
        StepPolicy::Foresight { c_kp } => match cfg.control {
            ControlMode::Foresight { c, eps } => foresight_step_size(eps, cfg.nu, c, c_kp),
            _ => Err(Error::Config("the foresight step policy needs control mode foresight".into())),
        },
    }
}

/// Fits and pass flags derived from a finished run.
pub fn summarize(ledger: &RunLedger) -> Result<(Vec<BoundFit>, BTreeMap<String, bool>)> {
    let steps = &ledger.steps;
    let series = |f: fn(&StepReport) -> f64| steps.iter().map(f).collect::<Vec<f64>>();
    let control = series(|r| r.control_hm_norm.max(r.control_cm_norm));
    let leray = series(|r| r.leray_sup);
    let velocity = series(|r| r.hm_norm_end.max(r.cm_norm_end));
    let velocity_sq = series(|r| r.hm_norm_end * r.hm_norm_end);
    let fits = vec![
        fit_bound(&velocity, BoundKind::Uniform)?,
        fit_bound(&velocity_sq, BoundKind::Linear)?,
        fit_bound(&control, BoundKind::Linear)?,
        fit_bound(&leray, BoundKind::Linear)?,
    ];
    let table = contraction_table(steps);
    let mut flags = BTreeMap::new();
    flags.insert("contraction".to_string(), table.all_pass());
    flags.insert(
        "divergence".to_string(),
        steps.iter().all(|r| r.div_norm <= 1e-6 * r.hm_norm_end * r.hm_norm_end),
    );
    if let Some(c) = ledger.config.control.scale() {
        flags.insert("velocity_bound".to_string(), velocity.iter().all(|&v| v <= c));
    }
    Ok((fits, flags))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    std::fs::write(dir.join(name), bytes)?;
    Ok(())
}

/// Run the configured scheme and write the JSON report, the step and
/// contraction CSV tables and any checkpoints into `out`.
pub fn cmd_run(cfg: &RunConfig, out: &Path, log: &mut dyn Write) -> Exit {
    match run(cfg, out, log) {
        Ok(()) => Exit::Success,
        Err(e) => report_error(&e, log),
    }
}

fn run(cfg: &RunConfig, out: &Path, log: &mut dyn Write) -> Result<()> {
    let scheme = cfg.scheme_config()?;
    let h = initial_field(cfg)?;
    std::fs::create_dir_all(out)?;
    let every = cfg.run.checkpoint_every;
    let ledger = run_global_with(&h, cfg.run.n_steps, &scheme, |o| {
        let l = o.report.l;
        let _ = writeln!(
            log,
            "step {l}: rho {:.6e}, {} sub-iterations, |v|_Hm {:.6e}",
            o.report.rho, o.report.n_subiter, o.report.hm_norm_end
        );
        if every > 0 && l % every == 0 {
            let name = format!("checkpoint_{l:05}.bin");
            write_checkpoint(out.join(&name), &Checkpoint::Vector(o.velocity.clone()))?;
            Ok(Some(name))
        } else {
            Ok(None)
        }
    })?;
    let (fits, pass_flags) = summarize(&ledger)?;
    let report = RunReport {
        config: cfg.clone(),
        steps: ledger.steps.clone(),
        fits,
        pass_flags,
    };
    write_file(out, &cfg.run.report, to_json_string(&report)?.as_bytes())?;
    write_steps_csv(&ledger.steps, std::fs::File::create(out.join(&cfg.run.steps_csv))?)?;
    write_contraction_csv(
        &contraction_table(&ledger.steps),
        std::fs::File::create(out.join(&cfg.run.contraction_csv))?,
    )?;
    Ok(())
}

/// Print the scheme constants for `(ν, ρ)` as JSON.
pub fn cmd_constants(nu: f64, rho: f64, c_n: u32, log: &mut dyn Write) -> Exit {
    let result = HeatParams::new(nu, rho)
        .and_then(|p| compute_constants(&p, &GridSpec::periodic_2pi(8)?, c_n))
        .and_then(|k| to_json_string(&k));
    match result {
        Ok(json) => {
            let _ = writeln!(log, "{json}");
            Exit::Success
        }
        Err(Error::InvalidArgument(msg)) => report_error(&Error::Config(msg), log),
        Err(e) => report_error(&e, log),
    }
}

/// One time step; prints the contraction table as CSV. Succeeds iff every
/// ratio is at most 1/2 and the first increment at most 1/4.
pub fn cmd_contraction(cfg: &RunConfig, out: Option<&Path>, log: &mut dyn Write) -> Exit {
    let result = (|| -> Result<bool> {
        let scheme = cfg.scheme_config()?;
        let h = initial_field(cfg)?;
        let ledger = run_global_with(&h, 1, &scheme, |_| Ok(None))?;
        let table = contraction_table(&ledger.steps);
        let mut csv = Vec::new();
        write_contraction_csv(&table, &mut csv)?;
        log.write_all(&csv)?;
        if let Some(dir) = out {
            std::fs::create_dir_all(dir)?;
            write_file(dir, &cfg.run.contraction_csv, &csv)?;
        }
        Ok(table.all_pass())
    })();
    match result {
        Ok(true) => Exit::Success,
        Ok(false) => Exit::Failure,
        Err(e) => report_error(&e, log),
    }
}

#[derive(Serialize)]
struct Comparison {
    rho: f64,
    star_subiterations: usize,
    nonstar_subiterations: usize,
    h2_distance: f64,
    pass: bool,
}

/// Agreement bound between the two schemes' local limits.
pub const SCHEME_AGREEMENT_TOL: f64 = 1e-6;

/// Local limits of the star and non-star iterations from the same data;
/// succeeds iff their trajectory H² distance is at most 1e-6.
pub fn cmd_compare_schemes(cfg: &RunConfig, log: &mut dyn Write) -> Exit {
    let result = (|| -> Result<Comparison> {
        let scheme = cfg.scheme_config()?;
        let h = initial_field(cfg)?;
        let rho = single_step_rho(&h, &scheme)?;
        let star = local_solve(&h, &scheme, rho)?;
        let nonstar = local_solve_nonstar(&h, &scheme, rho)?;
        let d = c0_traj_norm(&star.trajectory.sub(&nonstar.trajectory)?, 2)?;
        Ok(Comparison {
            rho,
            star_subiterations: star.n_subiter,
            nonstar_subiterations: nonstar.n_subiter,
            h2_distance: d,
            pass: d <= SCHEME_AGREEMENT_TOL,
        })
    })();
    match result.and_then(|c| Ok((to_json_string(&c)?, c.pass))) {
        Ok((json, pass)) => {
            let _ = writeln!(log, "{json}");
            if pass {
                Exit::Success
            } else {
                Exit::Failure
            }
        }
        Err(e) => report_error(&e, log),
    }
}

/// Write the run's initial field to `path`, read it back and compare bits.
pub fn cmd_checkpoint_roundtrip(cfg: &RunConfig, path: &Path, log: &mut dyn Write) -> Exit {
    let result = (|| -> Result<bool> {
        let field = Checkpoint::Vector(initial_field(cfg)?);
        write_checkpoint(path, &field)?;
        let back = read_checkpoint(path)?;
        Ok(back.to_bytes() == field.to_bytes())
    })();
    match result {
        Ok(true) => {
            let _ = writeln!(log, "roundtrip ok: {}", path.display());
            Exit::Success
        }
        Ok(false) => {
            let _ = writeln!(log, "roundtrip mismatch: {}", path.display());
            Exit::Failure
        }
        Err(e) => report_error(&e, log),
    }
}
