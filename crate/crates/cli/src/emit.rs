//! JSON and CSV report files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tauber_core::VerdictReport;

use crate::runner::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("cannot serialise report: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn to_json(report: &RunReport) -> Result<String, EmitError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// One CSV row per witness and per scalar detail, nested checks joined with `/`.
pub fn csv_rows(report: &RunReport) -> Vec<[String; 4]> {
    let mut rows = Vec::new();
    for c in &report.checks {
        collect(&c.report, &c.name, &mut rows);
    }
    rows
}

fn collect(r: &VerdictReport, path: &str, rows: &mut Vec<[String; 4]>) {
    let verdict = r.status.as_str().to_string();
    for w in &r.witnesses {
        rows.push([path.to_string(), w.label(), format_value(w.value), verdict.clone()]);
    }
    for (k, v) in &r.details {
        let value = match v {
            Value::Number(n) => n.as_f64().map(format_value),
            Value::String(s) if matches!(s.as_str(), "inf" | "-inf" | "nan") => Some(s.clone()),
            _ => None,
        };
        if let Some(value) = value {
            rows.push([path.to_string(), k.clone(), value, verdict.clone()]);
        }
    }
    for child in &r.children {
        collect(child, &format!("{path}/{}", child.check), rows);
    }
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

pub fn to_csv(report: &RunReport) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "parameter", "value", "verdict"])?;
    for row in csv_rows(report) {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Writes `<out>/<scenario>.json` and/or `<out>/<scenario>.csv`, returning
/// the paths written.
pub fn emit(report: &RunReport, format: Format, out: &Path) -> Result<Vec<PathBuf>, EmitError> {
    fs::create_dir_all(out).map_err(|source| EmitError::Io { path: out.to_path_buf(), source })?;
    let mut written = Vec::new();
    if matches!(format, Format::Json | Format::Both) {
        let path = out.join(format!("{}.json", report.scenario));
        fs::write(&path, to_json(report)?).map_err(|source| EmitError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    if matches!(format, Format::Csv | Format::Both) {
        let path = out.join(format!("{}.csv", report.scenario));
        let bytes = to_csv(report).map_err(|source| EmitError::Csv { path: path.clone(), source })?;
        fs::write(&path, bytes).map_err(|source| EmitError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}
