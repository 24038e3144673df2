//! Tabular output with an embedded metadata block.
//!
//! CSV files start with `# key: value` comment lines (version, command,
//! resolved configuration, then command-specific results) followed by a
//! header row. JSON files hold the same content as
//! `{"meta": {...}, "rows": [{column: value, ...}]}`. Floats carry 12
//! significant digits in both; non-finite values are written as `inf`,
//! `-inf` or `nan`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde_json::{Map, Value};

use crate::config::{OutputArgs, RunConfig, OUT_DIR_ENV};
use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => float_json(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

/// `%.12g`-style rendering: fixed notation for exponents in `[-4, 12)`,
/// scientific otherwise, trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

/// The rounded value as a JSON number, or a string for non-finite values.
pub fn float_json(x: f64) -> Value {
    let text = format_float(x);
    match text.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
        Some(n) if x.is_finite() => Value::Number(n),
        _ => Value::String(text),
    }
}

/// Rounds every float inside a JSON value to the output precision.
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => float_json(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

#[derive(Debug)]
pub struct Report {
    pub config: RunConfig,
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(config: RunConfig, columns: &[&str]) -> Self {
        Report { config, meta: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.push((key.to_owned(), round_json(value.into())));
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn header(&self) -> Result<Vec<(String, Value)>, CliError> {
        let mut head = vec![
            ("version".to_owned(), Value::from(env!("CARGO_PKG_VERSION"))),
            ("command".to_owned(), Value::from(self.config.command)),
            ("config".to_owned(), round_json(serde_json::to_value(&self.config)?)),
        ];
        head.extend(self.meta.iter().cloned());
        Ok(head)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        for (key, value) in self.header()? {
            let text = match value {
                Value::String(s) => s,
                other => other.to_string(),
            };
            out.push_str(&format!("# {key}: {text}\n"));
        }
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        let body = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(body).expect("CSV output is UTF-8"));
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let meta: Map<String, Value> = self.header()?.into_iter().collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect()))
            .collect();
        let doc = serde_json::json!({ "meta": meta, "rows": rows });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    /// Writes to `--out`, else to `$BERTRAND_OUT_DIR/<command>.<ext>`, else
    /// to stdout.
    pub fn emit(&self, out: &OutputArgs) -> Result<(), CliError> {
        let text = match out.format {
            crate::config::Format::Csv => self.to_csv()?,
            crate::config::Format::Json => self.to_json()?,
        };
        let path: Option<PathBuf> = match (&out.out, std::env::var_os(OUT_DIR_ENV)) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(dir)) => {
                let dir = PathBuf::from(dir);
                fs::create_dir_all(&dir)?;
                Some(dir.join(format!("{}.{}", self.config.command, out.format.extension())))
            }
            (None, None) => None,
        };
        match path {
            Some(p) => fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}
