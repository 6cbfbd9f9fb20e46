//! CSV and JSON rendering.

use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::run::{Cell, Report};

/// Fixed 17-significant-digit scientific notation.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format_float(*v),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => String::new(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

pub fn to_csv(report: &Report) -> String {
    let mut out = report.table.columns.join(",");
    out.push('\n');
    for row in &report.table.rows {
        let fields: Vec<String> = row.iter().map(csv_field).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn json_value(cell: &Cell) -> Value {
    match cell {
        // shortest round-trip repr; non-finite values become null
        Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Empty => Value::Null,
    }
}

pub fn to_json(report: &Report, cfg: &RunConfig, runtime_s: f64) -> Value {
    let mut echo = Map::new();
    echo.insert("mode".into(), Value::String(report.mode.to_string()));
    for (k, v) in &cfg.echo {
        echo.insert(k.clone(), Value::String(v.clone()));
    }
    let results: Vec<Value> = report
        .table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = report
                .table
                .columns
                .iter()
                .zip(row)
                .map(|(c, cell)| (c.to_string(), json_value(cell)))
                .collect();
            Value::Object(obj)
        })
        .collect();
    let summary: Map<String, Value> = report
        .summary
        .iter()
        .map(|(k, v)| (k.to_string(), json_value(v)))
        .collect();
    json!({
        "config_echo": echo,
        "results": results,
        "metadata": {
            "version": env!("CARGO_PKG_VERSION"),
            "runtime_s": runtime_s,
            "summary": summary,
        },
    })
}
