//! CSV tables and the JSON run manifest.

use crate::config::ScenarioConfig;
use crate::error::CliError;
use serde::Serialize;
use serde_json::{Map, Value};
use std::fmt::Write as _;
use std::path::Path;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub description: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: &str, description: impl Into<String>) -> Self {
        Self { name: name.into(), unit: unit.into(), description: description.into() }
    }
}

/// One CSV file; the first column is the independent variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(file: &str, columns: Vec<Column>) -> Self {
        Self { file: file.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Header plus rows, every value as `{:.16e}` (17 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if v.is_nan() {
                    out.push_str("NaN");
                } else {
                    write!(out, "{v:.16e}").expect("writing to a String");
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct TableEntry<'a> {
    file: &'a str,
    rows: usize,
    columns: &'a [Column],
}

/// Everything a scenario produces.
#[derive(Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    /// Derived quantities (onset values, SI conversions, scalar results).
    pub resolved: Map<String, Value>,
    pub gates: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn resolve(&mut self, key: &str, value: impl Into<Value>) {
        self.resolved.insert(key.into(), value.into());
    }

    pub fn gate(&mut self, key: &str, value: impl Into<Value>) {
        self.gates.insert(key.into(), value.into());
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn manifest(&self, config: &ScenarioConfig) -> Result<String, CliError> {
        let tables: Vec<TableEntry> =
            self.tables.iter().map(|t| TableEntry { file: &t.file, rows: t.rows.len(), columns: &t.columns }).collect();
        let mut m = Map::new();
        m.insert("kind".into(), config.kind().into());
        m.insert("config".into(), serde_json::to_value(config).map_err(|e| CliError::Config(e.to_string()))?);
        m.insert("resolved".into(), Value::Object(self.resolved.clone()));
        m.insert("gates".into(), Value::Object(self.gates.clone()));
        m.insert("tables".into(), serde_json::to_value(tables).map_err(|e| CliError::Config(e.to_string()))?);
        m.insert("warnings".into(), self.warnings.clone().into());
        let mut text = serde_json::to_string_pretty(&Value::Object(m)).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn write(&self, config: &ScenarioConfig, dir: &Path) -> Result<(), CliError> {
        let io = |path: &Path| {
            let path = path.to_owned();
            move |source| CliError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        for t in &self.tables {
            let path = dir.join(&t.file);
            std::fs::write(&path, t.to_csv()).map_err(io(&path))?;
        }
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, self.manifest(config)?).map_err(io(&path))
    }
}

/// Number or JSON null (manifests cannot hold NaN).
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
