//! Located extraction of typed values from parsed JSON.

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Largest integer a double represents exactly.
const MAX_EXACT_INT: f64 = 9_007_199_254_740_992.0;

pub(crate) fn expect_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::schema(path, path_field(path), format!("expected an object, found {}", kind(v))))
}

pub(crate) fn field<'a>(obj: &'a Map<String, Value>, path: &str, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::schema(path, name, "required field is missing"))
}

pub(crate) fn reject_unknown(obj: &Map<String, Value>, path: &str, known: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(Error::schema(
            path,
            k.as_str(),
            format!("unknown field; expected one of {}", known.join(", ")),
        )),
        None => Ok(()),
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn path_field(path: &str) -> &str {
    path.split(['[', '.']).next().filter(|s| !s.is_empty()).unwrap_or("$")
}

pub(crate) fn get_f64(v: &Value, path: &str, name: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::schema(path, name, format!("expected a number, found {}", kind(v))))
}

/// A non-negative integer, given either as a JSON integer or as an integral
/// double such as `2.0`.
pub(crate) fn get_u64(v: &Value, path: &str, name: &str) -> Result<u64> {
    if let Some(u) = v.as_u64() {
        return Ok(u);
    }
    let x = get_f64(v, path, name)?;
    if x.fract() != 0.0 || !(0.0..=MAX_EXACT_INT).contains(&x) {
        return Err(Error::schema(
            path,
            name,
            format!("expected a non-negative integer, found {x}"),
        ));
    }
    Ok(x as u64)
}

pub(crate) fn get_string(v: &Value, path: &str, name: &str) -> Result<String> {
    v.as_str()
        .map(str::to_owned)
        .ok_or_else(|| Error::schema(path, name, format!("expected a string, found {}", kind(v))))
}

pub(crate) fn get_enum<T: std::str::FromStr<Err = String>>(v: &Value, path: &str, name: &str) -> Result<T> {
    get_string(v, path, name)?
        .parse()
        .map_err(|e: String| Error::schema(path, name, e))
}

pub(crate) fn get_array<'a>(v: &'a Value, path: &str, name: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::schema(path, name, format!("expected an array, found {}", kind(v))))
}
