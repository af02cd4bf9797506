//! Report rendering: JSON with 15 significant digits, RFC-4180 CSV, and a
//! plain `key: value` text layout.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

/// A rendered report. `rows` names the array field that CSV output expands
/// into one line per element; otherwise the report is a single CSV row.
pub struct Report {
    pub value: Value,
    pub rows: Option<&'static str>,
}

impl Report {
    pub fn single(value: impl serde::Serialize) -> Result<Self> {
        Ok(Self {
            value: serde_json::to_value(value)?,
            rows: None,
        })
    }

    pub fn with_rows(value: impl serde::Serialize, rows: &'static str) -> Result<Self> {
        Ok(Self {
            value: serde_json::to_value(value)?,
            rows: Some(rows),
        })
    }
}

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = Number::from_f64(round15(x)).map(Value::Number).unwrap_or(Value::Null);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

pub fn render(report: &Report, format: Format, out: &mut dyn Write) -> Result<()> {
    let mut value = report.value.clone();
    round_value(&mut value);
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &value)?;
            writeln!(out)?;
        }
        Format::Csv => write_csv(&value, report.rows, out)?,
        Format::Text => write_text(&value, 0, out)?,
    }
    Ok(())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            items.iter().map(cell).collect::<Vec<_>>().join(";")
        }
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

fn write_csv(value: &Value, rows: Option<&str>, out: &mut dyn Write) -> Result<()> {
    let records: Vec<Vec<(String, String)>> = match (rows, value) {
        (Some(key), Value::Object(map)) => {
            let shared: Map<String, Value> = map
                .iter()
                .filter(|(k, v)| k.as_str() != key && !v.is_array() && !v.is_object())
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let items = map.get(key).and_then(Value::as_array).cloned().unwrap_or_default();
            items
                .iter()
                .map(|item| {
                    let mut fields = Vec::new();
                    flatten("", &Value::Object(shared.clone()), &mut fields);
                    flatten("", item, &mut fields);
                    fields
                })
                .collect()
        }
        (_, Value::Array(items)) => items
            .iter()
            .map(|item| {
                let mut fields = Vec::new();
                flatten("", item, &mut fields);
                fields
            })
            .collect(),
        (_, v) => {
            let mut fields = Vec::new();
            flatten("", v, &mut fields);
            vec![fields]
        }
    };
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = records
        .first()
        .map(|r| r.iter().map(|(k, _)| k.clone()).collect())
        .unwrap_or_default();
    w.write_record(&header)?;
    for r in &records {
        w.write_record(r.iter().map(|(_, v)| v))?;
    }
    w.flush()?;
    Ok(())
}

fn write_text(v: &Value, indent: usize, out: &mut dyn Write) -> Result<()> {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) => {
                        writeln!(out, "{pad}{k}:")?;
                        write_text(x, indent + 1, out)?;
                    }
                    Value::Array(items) if items.iter().any(|i| i.is_object()) => {
                        writeln!(out, "{pad}{k}:")?;
                        for (i, item) in items.iter().enumerate() {
                            writeln!(out, "{pad}  [{}]", i + 1)?;
                            write_text(item, indent + 2, out)?;
                        }
                    }
                    other => writeln!(out, "{pad}{k}: {}", cell(other))?,
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                writeln!(out, "{pad}[{}]", i + 1)?;
                write_text(item, indent + 1, out)?;
            }
        }
        other => writeln!(out, "{pad}{}", cell(other))?,
    }
    Ok(())
}
