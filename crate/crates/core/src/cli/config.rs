//! Run configuration: a TOML file with `[grid]`, `[scheme]`, `[control]` and
//! `[run]` sections, overridden key by key from the command line.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::presets::Preset;
use crate::control::ControlMode;
use crate::error::{Error, Result};
use crate::fields::GridSpec;
use crate::scheme::{SchemeConfig, StepPolicy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub half_width: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            n: 32,
            half_width: std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeSection {
    pub nu: f64,
    pub m: u32,
    pub c_bound: Option<f64>,
    pub c_n: u32,
    pub max_subiter: usize,
    pub tol: f64,
    pub nodes: usize,
    pub dealias: bool,
    /// `theorem`, `fixed`, `adaptive` or `foresight`
    pub step_policy: String,
    /// Used by `fixed`.
    pub rho: Option<f64>,
    /// Used by `adaptive`.
    pub rho0: Option<f64>,
    /// Used by `foresight`.
    pub c_kp: f64,
}

impl Default for SchemeSection {
    fn default() -> Self {
        let d = SchemeConfig::new(GridSpec::periodic_2pi(8).expect("valid grid"));
        SchemeSection {
            nu: d.nu,
            m: d.m,
            c_bound: d.c_bound,
            c_n: d.c_n,
            max_subiter: d.max_subiter,
            tol: d.tol,
            nodes: d.nodes,
            dealias: d.dealias,
            step_policy: "theorem".into(),
            rho: None,
            rho0: None,
            c_kp: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlSection {
    /// `none`, `simple`, `neg_first_increment`, `consumption` or `foresight`
    pub mode: String,
    pub c: Option<f64>,
    pub eps: Option<f64>,
}

impl Default for ControlSection {
    fn default() -> Self {
        ControlSection {
            mode: "none".into(),
            c: None,
            eps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// `taylor_green`, `abc_flow`, `gaussian_vortex` or `file:<path>`
    pub preset: String,
    pub n_steps: usize,
    pub seed: u64,
    /// Sup norm of the seeded divergence-free perturbation; 0 disables it.
    pub perturbation: f64,
    /// Write a checkpoint every this many steps; 0 disables checkpoints.
    pub checkpoint_every: usize,
    pub report: String,
    pub steps_csv: String,
    pub contraction_csv: String,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            preset: "taylor_green".into(),
            n_steps: 1,
            seed: 0,
            perturbation: 0.0,
            checkpoint_every: 0,
            report: "report.json".into(),
            steps_csv: "steps.csv".into(),
            contraction_csv: "contraction.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub scheme: SchemeSection,
    pub control: ControlSection,
    pub run: RunSection,
}

/// Parse the right side of `section.key=value` as a TOML value, falling
/// back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not of the form section.key=value")))?;
    let (section, field) = key
        .trim()
        .split_once('.')
        .ok_or_else(|| Error::Config(format!("override key '{key}' is not of the form section.key")))?;
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let toml::Value::Table(sec) = entry else {
        return Err(Error::Config(format!("'{section}' is not a section")));
    };
    sec.insert(field.to_string(), parse_value(raw.trim()));
    Ok(())
}

impl RunConfig {
    /// Defaults, then the file (if any), then the overrides in order.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                toml::from_str::<toml::Table>(&text).map_err(|e| Error::Config(e.to_string()))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.scheme_config()?;
        cfg.preset()?;
        if cfg.run.n_steps == 0 {
            return Err(Error::Config("run.n_steps must be >= 1".into()));
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.n, self.grid.half_width).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn preset(&self) -> Result<Preset> {
        Preset::parse(&self.run.preset)
    }

    pub fn control_mode(&self) -> Result<ControlMode> {
        let c = &self.control;
        let need = |name: &str, x: Option<f64>| {
            x.ok_or_else(|| Error::Config(format!("control mode '{}' needs control.{name}", c.mode)))
        };
        let mode = match c.mode.as_str() {
            "none" => ControlMode::None,
            "simple" => ControlMode::Simple { c: need("c", c.c)? },
            "neg_first_increment" => ControlMode::NegFirstIncrement,
            "consumption" => ControlMode::Consumption { c: need("c", c.c)? },
            "foresight" => ControlMode::Foresight {
                c: need("c", c.c)?,
                eps: need("eps", c.eps)?,
            },
            other => return Err(Error::Config(format!("unknown control mode '{other}'"))),
        };
        mode.validate()?;
        Ok(mode)
    }

    pub fn step_policy(&self) -> Result<StepPolicy> {
        let s = &self.scheme;
        let need = |name: &str, x: Option<f64>| {
            x.ok_or_else(|| Error::Config(format!("step policy '{}' needs scheme.{name}", s.step_policy)))
        };
        Ok(match s.step_policy.as_str() {
            "theorem" => StepPolicy::Theorem,
            "fixed" => StepPolicy::Fixed { rho: need("rho", s.rho)? },
            "adaptive" => StepPolicy::Adaptive { rho0: need("rho0", s.rho0)? },
            "foresight" => StepPolicy::Foresight { c_kp: s.c_kp },
            other => return Err(Error::Config(format!("unknown step policy '{other}'"))),
        })
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        let s = &self.scheme;
        let cfg = SchemeConfig {
            nu: s.nu,
            m: s.m,
            c_bound: s.c_bound,
            c_n: s.c_n,
            max_subiter: s.max_subiter,
            tol: s.tol,
            nodes: s.nodes,
            step_policy: self.step_policy()?,
            control: self.control_mode()?,
            dealias: s.dealias,
            grid: self.grid_spec()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
