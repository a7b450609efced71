//! CSV writers. Floats use Rust's shortest round-trip formatting; records
//! end with a bare LF.

use std::io::Write;

use spa_outage::{CapacityResult, Method, OutageResult};

use crate::CliError;

pub const OUTAGE_HEADER: [&str; 10] = [
    "scenario",
    "q_db",
    "q_linear",
    "method",
    "p_out",
    "t_hat",
    "iterations",
    "near_mean",
    "clamped",
    "error_estimate",
];

pub const CAPACITY_HEADER: [&str; 4] = ["scenario", "capacity_bits", "method", "error_estimate"];

pub const DEVIATION_HEADER: [&str; 10] = [
    "scenario",
    "q_db",
    "method_a",
    "method_b",
    "p_a",
    "p_b",
    "abs_diff",
    "bound",
    "near_mean",
    "within_bound",
];

/// Shortest decimal string that parses back to the same `f64`.
pub fn float(v: f64) -> String {
    format!("{v:?}")
}

fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

fn writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// One outage CSV record. A failed point keeps its coordinates and leaves
/// the result columns empty.
#[derive(Clone, Debug, PartialEq)]
pub struct OutageRow {
    fields: [String; 10],
}

impl OutageRow {
    pub fn new(scenario: &str, q_db: f64, q_linear: f64, method: Method, r: Option<&OutageResult<f64>>) -> Self {
        let mut fields: [String; 10] = Default::default();
        fields[0] = scenario.to_string();
        fields[1] = float(q_db);
        fields[2] = float(q_linear);
        fields[3] = method.label().to_string();
        if let Some(r) = r {
            fields[4] = float(r.p_out);
            fields[5] = opt_float(r.t_hat);
            fields[6] = r.iterations.map(|i| i.to_string()).unwrap_or_default();
            fields[7] = r.near_mean.to_string();
            fields[8] = r.clamped.to_string();
            fields[9] = opt_float(r.error_estimate);
        }
        Self { fields }
    }
}

pub fn write_outage(out: &mut dyn Write, rows: &[OutageRow]) -> Result<(), CliError> {
    let mut w = writer(out);
    w.write_record(OUTAGE_HEADER)?;
    for r in rows {
        w.write_record(&r.fields)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityRow {
    fields: [String; 4],
}

impl CapacityRow {
    pub fn new(scenario: &str, method: Method, r: Option<&CapacityResult<f64>>) -> Self {
        Self {
            fields: [
                scenario.to_string(),
                r.map(|r| float(r.capacity_bits)).unwrap_or_default(),
                method.label().to_string(),
                r.map(|r| float(r.error_estimate)).unwrap_or_default(),
            ],
        }
    }
}

pub fn write_capacity(out: &mut dyn Write, rows: &[CapacityRow]) -> Result<(), CliError> {
    let mut w = writer(out);
    w.write_record(CAPACITY_HEADER)?;
    for r in rows {
        w.write_record(&r.fields)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationRow {
    pub scenario: String,
    pub q_db: f64,
    pub method_a: Method,
    pub method_b: Method,
    pub p_a: f64,
    pub p_b: f64,
    pub abs_diff: f64,
    pub bound: f64,
    pub near_mean: bool,
    pub within: bool,
}

pub fn write_deviations(out: &mut dyn Write, rows: &[DeviationRow]) -> Result<(), CliError> {
    let mut w = writer(out);
    w.write_record(DEVIATION_HEADER)?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            float(r.q_db),
            r.method_a.label().to_string(),
            r.method_b.label().to_string(),
            float(r.p_a),
            float(r.p_b),
            float(r.abs_diff),
            float(r.bound),
            r.near_mean.to_string(),
            r.within.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
