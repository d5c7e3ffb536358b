use std::io::{Read, Write};

use super::traces::attach_file;
use crate::divergence::{FeatureSampleSet, Source};
use crate::error::{Error, Result, SchemaError};

/// Feature rows read from a sample CSV, split by source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleRows {
    pub real: Vec<Vec<f64>>,
    pub synthetic: Vec<Vec<f64>>,
}

impl SampleRows {
    pub fn into_sets(self) -> Result<(FeatureSampleSet, FeatureSampleSet)> {
        Ok((
            FeatureSampleSet::new(self.real, Source::Real)?,
            FeatureSampleSet::new(self.synthetic, Source::Synthetic)?,
        ))
    }
}

fn schema(file: &str, location: String, field: &str, message: String) -> Error {
    Error::Schema(SchemaError::new(location, field, message).in_file(file))
}

/// Reads feature samples.
///
/// The header is `source,dim0,dim1,...`. A file holding a single source may
/// omit the `source` column (header `dim0,dim1,...`) when `default_source`
/// is given; when both are present every row must match `default_source`.
pub fn read_samples_csv(reader: impl Read, file: &str, default_source: Option<Source>) -> Result<SampleRows> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut rows = rdr.records();
    let header = match rows.next() {
        None => return Err(Error::EmptyInput(format!("{file}: no header"))),
        Some(h) => h.map_err(|e| schema(file, "row 1".into(), "header", e.to_string()))?,
    };
    let has_source = header.get(0) == Some("source");
    if !has_source && default_source.is_none() {
        return Err(schema(file, "row 1".into(), "source", "expected a `source` column first".into()));
    }
    let offset = has_source as usize;
    let dim = header.len() - offset;
    if dim == 0 {
        return Err(schema(file, "row 1".into(), "dim0", "expected at least one feature column".into()));
    }
    for (d, name) in header.iter().skip(offset).enumerate() {
        if name != format!("dim{d}") {
            return Err(schema(file, "row 1".into(), "header", format!("expected `dim{d}`, found `{name}`")));
        }
    }

    let mut out = SampleRows::default();
    for row in rows {
        let row = row.map_err(|e| {
            let loc = e.position().map_or("input".into(), |p| format!("row {}", p.line()));
            schema(file, loc, "row", e.to_string())
        })?;
        let loc = format!("row {}", row.position().map_or(0, |p| p.line()));
        let source = if has_source {
            let s: Source = row[0].parse().map_err(|m| schema(file, loc.clone(), "source", m))?;
            if let Some(want) = default_source.filter(|&w| w != s) {
                return Err(schema(
                    file,
                    loc,
                    "source",
                    format!("expected `{}`, found `{}`", want.as_str(), s.as_str()),
                ));
            }
            s
        } else {
            default_source.expect("checked above")
        };
        let point = (0..dim)
            .map(|d| {
                let raw = &row[d + offset];
                raw.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| schema(file, loc.clone(), &format!("dim{d}"), format!("expected a finite number, found `{raw}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        match source {
            Source::Real => out.real.push(point),
            Source::Synthetic => out.synthetic.push(point),
        }
    }
    if out.real.is_empty() && out.synthetic.is_empty() {
        return Err(Error::EmptyInput(format!("{file}: no sample rows")));
    }
    Ok(out)
}

pub fn write_samples_csv(sets: &[&FeatureSampleSet], mut out: impl Write) -> std::io::Result<()> {
    let dim = sets.first().map_or(0, |s| s.dim());
    let header: Vec<String> = std::iter::once("source".to_owned())
        .chain((0..dim).map(|d| format!("dim{d}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for set in sets {
        for p in set.points() {
            write!(out, "{}", set.source().as_str())?;
            for x in p {
                write!(out, ",{x}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

pub(crate) fn read_samples_file(path: &std::path::Path, default_source: Option<Source>) -> Result<SampleRows> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_samples_csv(std::io::BufReader::new(file), &path.display().to_string(), default_source)
        .map_err(|e| attach_file(e, &path.display().to_string()))
}
