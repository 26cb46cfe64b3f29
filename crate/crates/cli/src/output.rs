//! Report rendering and destinations.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    pub fn emit(&self, body: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `# key: value` lines for a flat or nested config object.
pub fn config_header(config: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, x, out);
                }
            }
            _ => {
                let _ = writeln!(out, "# {prefix}: {}", scalar(v));
            }
        }
    }
    let mut out = String::new();
    walk("", config, &mut out);
    out
}

/// A failed cross-check, reported as a machine-readable diff.
#[derive(Debug, Clone, Serialize)]
pub struct CheckFailure {
    pub check: String,
    pub expected: Value,
    pub found: Value,
}

impl CheckFailure {
    pub fn new(check: &str, expected: impl Serialize, found: impl Serialize) -> Self {
        Self {
            check: check.to_string(),
            expected: serde_json::to_value(expected).expect("serializable"),
            found: serde_json::to_value(found).expect("serializable"),
        }
    }
}

pub fn check_lines(failures: &[CheckFailure]) -> String {
    if failures.is_empty() {
        return "checks: all passed\n".to_string();
    }
    let mut out = String::new();
    for f in failures {
        let _ = writeln!(
            out,
            "check failed: {} (expected {}, found {})",
            f.check, f.expected, f.found
        );
    }
    out
}
