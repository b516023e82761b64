//! Deterministic JSON and CSV rendering.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{CliError, CliResult};

pub const TOOL: &str = "fracvel";

/// Significant digits of every float written to JSON.
pub const JSON_DIGITS: usize = 17;

/// A float with exactly [`JSON_DIGITS`] significant digits; `null` if not finite.
///
/// Positional notation for decimal exponents in `[-4, 20]`, scientific otherwise.
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    let v = if v == 0.0 { 0.0 } else { v };
    let sci = format!("{v:.prec$e}", prec = JSON_DIGITS - 1);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-4..=20).contains(&exp) {
        let decimals = (JSON_DIGITS as i32 - 1 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s
        } else {
            s + ".0"
        }
    } else {
        sci
    }
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => write!(out, "{u}").unwrap(),
            (None, Some(i)) => write!(out, "{i}").unwrap(),
            _ => out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

/// Compact single-line JSON with a trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out.push('\n');
    out
}

/// Converts a serialisable value, mapping serialisation failures to analysis errors.
pub fn to_value<S: Serialize>(s: &S) -> CliResult<Value> {
    serde_json::to_value(s).map_err(|e| CliError::Analysis(format!("serialisation failed: {e}")))
}

/// The top-level object: `meta`, `command`, `function`, then the payload fields.
pub fn document(command: &str, function: Option<&str>, payload: Vec<(&str, Value)>) -> Value {
    let mut meta = Map::new();
    meta.insert("tool".into(), TOOL.into());
    meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    let mut doc = Map::new();
    doc.insert("meta".into(), Value::Object(meta));
    doc.insert("command".into(), command.into());
    if let Some(f) = function {
        doc.insert("function".into(), f.into());
    }
    for (k, v) in payload {
        doc.insert(k.into(), v);
    }
    Value::Object(doc)
}

/// Round-trip float for CSV cells; empty when absent or not finite.
pub fn csv_float(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:?}"),
        _ => String::new(),
    }
}

/// CSV text from a header and rows.
pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Analysis(format!("csv rendering failed: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Analysis(format!("csv rendering failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Analysis(format!("csv rendering failed: {e}")))
}

/// Writes rendered text to `dest`, or stdout when `None`.
pub fn emit_report(text: &str, dest: Option<&Path>) -> CliResult<()> {
    match dest {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
