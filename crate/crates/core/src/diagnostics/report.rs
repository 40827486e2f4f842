use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use super::{BoundFit, ContractionTable};
use crate::error::Result;
use crate::scheme::StepReport;

/// The JSON document written for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport<C> {
    pub config: C,
    pub steps: Vec<StepReport>,
    pub fits: Vec<BoundFit>,
    pub pass_flags: BTreeMap<String, bool>,
}

/// Compact JSON with every float written to 17 significant digits.
struct Precise;

impl Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Precise);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_contraction_csv<W: Write>(table: &ContractionTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["l", "k", "ratio", "squared_ratio", "pass"])?;
    for r in &table.rows {
        w.write_record([
            r.l.to_string(),
            r.k.to_string(),
            fmt(r.ratio),
            fmt(r.squared_ratio),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_steps_csv<W: Write>(reports: &[StepReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "l",
        "rho",
        "c_prev",
        "n_subiter",
        "max_ratio",
        "first_increment_norm",
        "hm_norm_end",
        "cm_norm_end",
        "control_hm_norm",
        "control_cm_norm",
        "leray_sup",
        "div_norm",
        "physical_time",
    ])?;
    for r in reports {
        let max_ratio = r.ratios.iter().copied().fold(0.0, f64::max);
        w.write_record([
            r.l.to_string(),
            fmt(r.rho),
            fmt(r.c_prev),
            r.n_subiter.to_string(),
            fmt(max_ratio),
            fmt(r.first_increment_norm),
            fmt(r.hm_norm_end),
            fmt(r.cm_norm_end),
            fmt(r.control_hm_norm),
            fmt(r.control_cm_norm),
            fmt(r.leray_sup),
            fmt(r.div_norm),
            fmt(r.physical_time),
        ])?;
    }
    w.flush()?;
    Ok(())
}
