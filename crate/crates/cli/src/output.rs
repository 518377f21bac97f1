use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{Map, Value};

use crate::Format;

/// One command's result in every output format.
pub struct Report {
    pub text: String,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Replaces the per-row JSON lines when present.
    pub json: Option<Vec<Value>>,
}

impl Report {
    pub fn table(headers: Vec<&'static str>, rows: Vec<Vec<Value>>, text: String) -> Self {
        Report {
            text,
            headers,
            rows,
            json: None,
        }
    }

    fn json_lines(&self) -> Vec<Value> {
        if let Some(j) = &self.json {
            return j.clone();
        }
        self.rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, v)| (h.to_string(), v.clone()))
                    .collect();
                Value::Object(obj)
            })
            .collect()
    }

    pub fn render(&self, format: Format) -> String {
        let mut s = String::new();
        match format {
            Format::Text => {
                s.push_str(&self.text);
                if !self.text.is_empty() && !self.text.ends_with('\n') {
                    s.push('\n');
                }
            }
            Format::Json => {
                for v in self.json_lines() {
                    s.push_str(&v.to_string());
                    s.push('\n');
                }
            }
            Format::Csv => {
                s.push_str(&self.headers.join(","));
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
            }
        }
        s
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
