//! File formats: trace CSV/JSON, instance JSON, feature-sample CSV, and
//! report rendering.
//!
//! Every rejection is a [`SchemaError`](crate::error::SchemaError) carrying
//! the file, a row number or JSON path, and the offending field.

mod instance;
mod json;
mod report;
mod samples;
mod traces;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

pub use instance::{parse_instance, read_instance_json, write_instance_json};
pub use report::{
    fmt_sig, render_csv, render_table, report_digits, write_report, write_scatter_csv, Cell, Report, ReportFormat,
    Table, DEFAULT_TABLE_DIGITS, DIGITS_ENV,
};
pub use samples::{read_samples_csv, write_samples_csv, SampleRows};
pub use traces::{read_traces_csv, read_traces_json, write_traces_csv, write_traces_json, TRACE_HEADER};

pub(crate) use samples::read_samples_file;

use crate::domain::FiniteInstance;
use crate::error::{Error, Result};
use crate::selection::EvalTraceSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Json,
}

impl TraceFormat {
    /// `.json` means JSON; anything else is read as CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => TraceFormat::Json,
            _ => TraceFormat::Csv,
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn read_traces(path: &Path, format: Option<TraceFormat>) -> Result<EvalTraceSet> {
    let name = path.display().to_string();
    match format.unwrap_or_else(|| TraceFormat::from_path(path)) {
        TraceFormat::Csv => read_traces_csv(open(path)?, &name),
        TraceFormat::Json => read_traces_json(open(path)?, &name),
    }
}

pub fn write_traces(traces: &EvalTraceSet, path: &Path, format: Option<TraceFormat>) -> Result<()> {
    let mut out = create(path)?;
    match format.unwrap_or_else(|| TraceFormat::from_path(path)) {
        TraceFormat::Csv => write_traces_csv(traces, &mut out),
        TraceFormat::Json => write_traces_json(traces, &mut out),
    }
    .and_then(|()| out.flush())
    .map_err(|e| Error::io(path, e))
}

pub fn read_instance(path: &Path) -> Result<FiniteInstance> {
    read_instance_json(open(path)?, &path.display().to_string())
}

pub fn write_instance(inst: &FiniteInstance, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    write_instance_json(inst, &mut out)
        .and_then(|()| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// Writes already-rendered bytes, surfacing failures with the path.
pub fn write_bytes(bytes: &[u8], path: &Path) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
