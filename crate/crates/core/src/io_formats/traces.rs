use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde_json::Value;

use super::json::{expect_object, field, get_enum, get_string, get_u64, get_f64, reject_unknown};
use crate::error::{Error, Result, SchemaError};
use crate::selection::{EvalRecord, EvalTraceSet};

pub const TRACE_HEADER: [&str; 6] = ["arch_id", "run_id", "epoch", "split", "trained_on", "error"];

fn csv_error(file: &str, e: csv::Error) -> Error {
    let location = e
        .position()
        .map(|p| format!("row {}", p.line()))
        .unwrap_or_else(|| "input".to_owned());
    match e.into_kind() {
        csv::ErrorKind::Io(err) => Error::io(file, err),
        kind => Error::Schema(SchemaError::new(location, "row", format!("{kind:?}")).in_file(file)),
    }
}

fn parse_field<T: std::str::FromStr>(raw: &str, row: &str, name: &str, file: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| {
        Error::Schema(SchemaError::new(row, name, format!("cannot parse `{raw}`: {e}")).in_file(file))
    })
}

/// Reads a trace CSV with header `arch_id,run_id,epoch,split,trained_on,error`.
///
/// Rows are located by their line number in the file (the header is row 1).
pub fn read_traces_csv(reader: impl Read, file: &str) -> Result<EvalTraceSet> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut rows = rdr.records();
    let header = match rows.next() {
        None => return Err(Error::EmptyInput(format!("{file}: no header"))),
        Some(h) => h.map_err(|e| csv_error(file, e))?,
    };
    if header.iter().ne(TRACE_HEADER) {
        return Err(Error::Schema(
            SchemaError::new(
                "row 1",
                "header",
                format!(
                    "expected `{}`, found `{}`",
                    TRACE_HEADER.join(","),
                    header.iter().collect::<Vec<_>>().join(",")
                ),
            )
            .in_file(file),
        ));
    }
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for row in rows {
        let row = row.map_err(|e| csv_error(file, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let loc = format!("row {line}");
        let [arch, run, epoch, split, trained_on, error] =
            std::array::from_fn(|i| row.get(i).unwrap_or_default());
        records.push(EvalRecord {
            arch_id: arch.to_owned(),
            run_id: parse_field(run, &loc, "run_id", file)?,
            epoch: parse_field(epoch, &loc, "epoch", file)?,
            split: parse_field(split, &loc, "split", file)?,
            trained_on: parse_field(trained_on, &loc, "trained_on", file)?,
            error: parse_field(error, &loc, "error", file)?,
        });
        lines.push(line);
    }
    if records.is_empty() {
        return Err(Error::EmptyInput(format!("{file}: no trace rows")));
    }
    EvalTraceSet::with_locations(records, BTreeMap::new(), |i| format!("row {}", lines[i]))
        .map_err(|e| attach_file(e, file))
}

pub(crate) fn attach_file(e: Error, file: &str) -> Error {
    match e {
        Error::Schema(s) if s.file.is_none() => Error::Schema(s.in_file(file)),
        other => other,
    }
}

pub fn write_traces_csv(traces: &EvalTraceSet, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{}", TRACE_HEADER.join(","))?;
    for r in traces.records() {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.arch_id, r.run_id, r.epoch, r.split, r.trained_on, r.error
        )?;
    }
    Ok(())
}

/// Reads a JSON array of trace records with the CSV column names as keys.
pub fn read_traces_json(reader: impl Read, file: &str) -> Result<EvalTraceSet> {
    let doc: Value = serde_json::from_reader(reader).map_err(|e| {
        if e.is_eof() && e.line() <= 1 && e.column() == 0 {
            Error::EmptyInput(format!("{file}: empty document"))
        } else {
            Error::Schema(
                SchemaError::new(format!("line {} column {}", e.line(), e.column()), "$", e.to_string())
                    .in_file(file),
            )
        }
    })?;
    let Value::Array(items) = doc else {
        return Err(Error::Schema(
            SchemaError::new("$", "$", "expected an array of records").in_file(file),
        ));
    };
    if items.is_empty() {
        return Err(Error::EmptyInput(format!("{file}: no trace records")));
    }
    let mut records = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let path = format!("[{i}]");
        let obj = expect_object(item, &path).map_err(|e| attach_file(e, file))?;
        let rec = (|| {
            reject_unknown(obj, &path, &TRACE_HEADER)?;
            Ok::<_, Error>(EvalRecord {
                arch_id: get_string(field(obj, &path, "arch_id")?, &path, "arch_id")?,
                run_id: get_u64(field(obj, &path, "run_id")?, &path, "run_id")?,
                epoch: get_u64(field(obj, &path, "epoch")?, &path, "epoch")?,
                split: get_enum(field(obj, &path, "split")?, &path, "split")?,
                trained_on: get_enum(field(obj, &path, "trained_on")?, &path, "trained_on")?,
                error: get_f64(field(obj, &path, "error")?, &path, "error")?,
            })
        })()
        .map_err(|e| attach_file(e, file))?;
        records.push(rec);
    }
    EvalTraceSet::with_locations(records, BTreeMap::new(), |i| format!("[{i}]"))
        .map_err(|e| attach_file(e, file))
}

pub fn write_traces_json(traces: &EvalTraceSet, mut out: impl Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, traces.records())?;
    writeln!(out)
}
