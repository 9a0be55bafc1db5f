//! Report rendering and atomic file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::{Map, Value};
use tempfile::NamedTempFile;

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "QWIT_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Kv,
    Json,
    Csv,
}

impl Format {
    pub fn witness_ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            _ => "kv",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(cell)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self.header.iter().cloned().zip(r.iter().cloned()).collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

/// Ordered key/value report with an optional table.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub fields: Vec<(String, Value)>,
    pub table: Option<Table>,
}

impl Report {
    pub fn field(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), v.into()));
        self
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Kv => {
                let mut s = String::new();
                for (k, v) in &self.fields {
                    s.push_str(&format!("{k} {}\n", cell(v)));
                }
                if let Some(t) = &self.table {
                    for line in t.to_csv()?.lines() {
                        s.push_str(&format!("# {line}\n"));
                    }
                }
                Ok(s)
            }
            Format::Json => {
                let mut m: Map<String, Value> = self.fields.iter().cloned().collect();
                if let Some(t) = &self.table {
                    m.insert("rows".into(), t.to_json());
                }
                Ok(serde_json::to_string_pretty(&Value::Object(m)).expect("json value") + "\n")
            }
            Format::Csv => match &self.table {
                Some(t) => t.to_csv(),
                None => {
                    let mut t = Table::new(&["key", "value"]);
                    for (k, v) in &self.fields {
                        t.rows.push(vec![Value::String(k.clone()), v.clone()]);
                    }
                    t.to_csv()
                }
            },
        }
    }
}

/// Relative paths are resolved against the output directory variable when
/// it is set.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Directory for multi-file outputs: `--out`, else the environment
/// variable, else `./qwit-out`.
pub fn bundle_dir(out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => resolve(p),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("qwit-out")),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(content.as_bytes()).map_err(io)?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Prints to stdout, or writes atomically to `--out` when given.
pub fn emit(content: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(&resolve(p), content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
