use std::io::{Read, Write};

use serde::ser::{Serialize, Serializer};
use serde_json::Value;

use super::json::{expect_object, field, get_array, get_f64, get_u64, reject_unknown};
use super::traces::attach_file;
use crate::domain::{FiniteDomain, FiniteInstance, LabelMap, Pmf};
use crate::error::{Error, Result, SchemaError};

const FIELDS: [&str; 6] = ["n", "c", "mu_r", "mu_s", "f", "hypotheses"];

#[derive(serde::Serialize)]
struct InstanceDoc<'a> {
    n: usize,
    c: u32,
    mu_r: &'a [f64],
    mu_s: &'a [f64],
    f: &'a [u32],
    hypotheses: Vec<&'a [u32]>,
}

impl Serialize for FiniteInstance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceDoc {
            n: self.domain().size(),
            c: self.domain().num_classes(),
            mu_r: self.mu_r().masses(),
            mu_s: self.mu_s().masses(),
            f: self.f().labels(),
            hypotheses: self.hypotheses().iter().map(LabelMap::labels).collect(),
        }
        .serialize(s)
    }
}

fn reals(v: &Value, name: &str) -> Result<Vec<f64>> {
    get_array(v, name, name)?
        .iter()
        .enumerate()
        .map(|(i, x)| get_f64(x, &format!("{name}[{i}]"), name))
        .collect()
}

fn labels(v: &Value, path: &str, name: &str) -> Result<Vec<u32>> {
    get_array(v, path, name)?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = format!("{path}[{i}]");
            let u = get_u64(x, &p, name)?;
            u32::try_from(u).map_err(|_| Error::schema(p, name, format!("label {u} too large")))
        })
        .collect()
}

fn pmf(v: &Value, name: &str) -> Result<Pmf> {
    Pmf::new(reals(v, name)?).map_err(|e| {
        let location = if e.location.starts_with('[') {
            format!("{name}{}", e.location)
        } else {
            name.to_owned()
        };
        Error::Schema(SchemaError::new(location, name, e.message))
    })
}

pub fn parse_instance(doc: &Value) -> Result<FiniteInstance> {
    let obj = expect_object(doc, "$")?;
    reject_unknown(obj, "$", &FIELDS)?;
    let n = get_u64(field(obj, "$", "n")?, "n", "n")?;
    let c = get_u64(field(obj, "$", "c")?, "c", "c")?;
    let c = u32::try_from(c).map_err(|_| Error::schema("c", "c", format!("class count {c} too large")))?;
    let domain = FiniteDomain::new(n as usize, c)?;
    let mu_r = pmf(field(obj, "$", "mu_r")?, "mu_r")?;
    let mu_s = pmf(field(obj, "$", "mu_s")?, "mu_s")?;
    let f = labels(field(obj, "$", "f")?, "f", "f")?;
    let hypotheses = get_array(field(obj, "$", "hypotheses")?, "hypotheses", "hypotheses")?
        .iter()
        .enumerate()
        .map(|(k, h)| labels(h, &format!("hypotheses[{k}]"), "hypotheses").map(LabelMap::from))
        .collect::<Result<Vec<_>>>()?;
    Ok(FiniteInstance::new(domain, mu_r, mu_s, LabelMap::from(f), hypotheses)?)
}

pub fn read_instance_json(reader: impl Read, file: &str) -> Result<FiniteInstance> {
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
    parse_instance(&doc).map_err(|e| attach_file(e, file))
}

pub fn write_instance_json(inst: &FiniteInstance, mut out: impl Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, inst)?;
    writeln!(out)
}
