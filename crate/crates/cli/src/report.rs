//! Report envelopes and CSV rendering.
use std::fs;
use std::path::Path;

use qmetric::format_sig;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::inputs::Inputs;
use crate::CliError;

/// SHA-256 over the canonical configuration JSON followed by the bytes of
/// every input file.
pub fn config_hash(config: &Value, inputs: &Inputs) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("config serializes"));
    for (_, bytes) in &inputs.files {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub hash: String,
    pub result: Value,
    /// Rows for CSV output; `None` renders the scalar fields of `result`.
    pub table: Option<(Vec<&'static str>, Vec<Vec<Cell>>)>,
}

pub enum Cell {
    Num(f64),
    Int(usize),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_sig(*v),
            Cell::Int(v) => v.to_string(),
        }
    }
}

impl Report {
    pub fn new(command: &'static str, config: Value, inputs: &Inputs, result: impl Serialize) -> Self {
        Report {
            command,
            hash: config_hash(&config, inputs),
            config,
            result: serde_json::to_value(result).expect("result serializes"),
            table: None,
        }
    }

    pub fn json(&self) -> String {
        let v = json!({
            "tool": "qmetric",
            "version": qmetric::VERSION,
            "command": self.command,
            "config_hash": self.hash,
            "config": self.config,
            "result": self.result,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn csv(&self) -> String {
        let mut out = format!("# qmetric {} {} config_hash={}\n", qmetric::VERSION, self.command, self.hash);
        match &self.table {
            Some((header, rows)) => {
                out.push_str(&header.join(","));
                out.push('\n');
                for row in rows {
                    out.push_str(&row.iter().map(Cell::render).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
            }
            None => {
                out.push_str("key,value\n");
                flatten("", &self.result, &mut out);
            }
        }
        out
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let text = match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
        };
        match out {
            Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Scalar leaves as `path,value`; arrays and nested objects use dotted paths.
fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::Number(n) => out.push_str(&format!("{prefix},{}\n", n.as_f64().map(format_sig).unwrap_or_default())),
        Value::Bool(b) => out.push_str(&format!("{prefix},{b}\n")),
        Value::String(s) => out.push_str(&format!("{prefix},{s}\n")),
        Value::Null => out.push_str(&format!("{prefix},\n")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}
