//! Number formatting and report rendering.
//!
//! Machine formats (CSV, JSON) carry 12 significant digits, human tables 4
//! decimals.

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::report::{Cell, RunReport, Table};

pub const MACHINE_DIGITS: usize = 12;
pub const HUMAN_DECIMALS: usize = 4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Csv,
    Json,
}

/// Rounds to `digits` significant decimal digits. Negative zero becomes zero.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x + 0.0;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    s.parse::<f64>().expect("formatted float parses") + 0.0
}

/// Shortest text for `x` rounded to 12 significant digits.
///
/// `machine(parse(machine(x))) == machine(x)` for every finite `x`.
pub fn machine(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x, MACHINE_DIGITS);
    let mag = r.abs();
    if mag != 0.0 && !(1e-5..1e16).contains(&mag) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

pub fn human(x: f64) -> String {
    let s = format!("{:.*}", HUMAN_DECIMALS, x);
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn cell_machine(c: &Cell) -> String {
    match c {
        Cell::Num(x) => machine(*x),
        Cell::Int(n) => n.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn cell_human(c: &Cell) -> String {
    match c {
        Cell::Num(x) => human(*x),
        Cell::Int(n) => n.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => "-".into(),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Num(x) => num_json(*x),
        Cell::Int(n) => Value::from(*n),
        Cell::Text(s) => Value::from(s.as_str()),
        Cell::Empty => Value::Null,
    }
}

fn num_json(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x, MACHINE_DIGITS)).map_or(Value::Null, Value::Number)
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_json(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num_json(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(xs) => Value::Array(xs.iter().map(round_json).collect()),
        Value::Object(m) => Value::Object(m.iter().map(|(k, v)| (k.clone(), round_json(v))).collect()),
        other => other.clone(),
    }
}

pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Human => render_human(report),
        Format::Csv => render_csv(report),
        Format::Json => render_json(report),
    }
}

fn render_csv(report: &RunReport) -> String {
    let blocks: Vec<String> = report.tables.iter().map(csv_table).collect();
    blocks.join("\n")
}

fn csv_table(t: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.columns).expect("in-memory write");
    for row in &t.rows {
        w.write_record(row.iter().map(cell_machine)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn render_json(report: &RunReport) -> String {
    let mut results = Map::new();
    for t in &report.tables {
        let rows = t
            .rows
            .iter()
            .map(|row| Value::Object(t.columns.iter().cloned().zip(row.iter().map(cell_json)).collect()))
            .collect();
        results.insert(t.name.clone(), Value::Array(rows));
    }
    let mut prov = Map::new();
    prov.insert("tool_version".into(), Value::from(report.provenance.tool_version.as_str()));
    prov.insert("seed".into(), report.provenance.seed.map_or(Value::Null, Value::from));
    if let Some(t) = report.provenance.wall_clock_s {
        prov.insert("wall_clock_s".into(), num_json(t));
    }
    let mut root = Map::new();
    root.insert("command".into(), Value::from(report.command.as_str()));
    root.insert("parameters".into(), round_json(&report.parameters));
    root.insert("results".into(), Value::Object(results));
    root.insert("notes".into(), Value::from(report.notes.clone()));
    root.insert("provenance".into(), Value::Object(prov));
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("json values serialize");
    s.push('\n');
    s
}

fn human_value(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), machine),
        Value::Array(xs) => format!("[{}]", xs.iter().map(human_value).collect::<Vec<_>>().join(", ")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `key=value` pairs with nested objects flattened to dotted keys.
fn flatten_params(v: &Value, prefix: &str, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_params(v, &key, out);
            }
        }
        Value::Null => {}
        other => out.push(format!("{prefix}={}", human_value(other))),
    }
}

fn render_human(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("siggame {}\n", report.command));
    let mut parts = Vec::new();
    flatten_params(&report.parameters, "", &mut parts);
    if !parts.is_empty() {
        out.push_str(&format!("parameters: {}\n", parts.join(" ")));
    }
    for t in &report.tables {
        out.push('\n');
        out.push_str(&t.title);
        out.push('\n');
        let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(cell_human).collect()).collect();
        let widths: Vec<usize> = (0..t.columns.len())
            .map(|j| cells.iter().map(|r| r[j].len()).chain([t.columns[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |items: &[String]| {
            let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            format!("  {}\n", padded.join("  "))
        };
        out.push_str(&line(&t.columns));
        for r in &cells {
            out.push_str(&line(r));
        }
    }
    if !report.notes.is_empty() {
        out.push('\n');
        for n in &report.notes {
            out.push_str(&format!("note: {n}\n"));
        }
    }
    let p = &report.provenance;
    out.push_str(&format!("\nsiggame {}", p.tool_version));
    if let Some(seed) = p.seed {
        out.push_str(&format!(", seed {seed}"));
    }
    if let Some(t) = p.wall_clock_s {
        out.push_str(&format!(", {:.3} s", t));
    }
    out.push('\n');
    out
}
