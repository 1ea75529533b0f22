//! In-memory CSV/JSON artifacts with declared schemas.

use serde::Serialize;

use crate::error::{Error, Result};

pub const SCHEMA_PREFIX: &str = "# schema: ";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    /// Human-readable summary table.
    pub summary: String,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn add_csv(&mut self, csv: Csv) {
        let name = format!("{}.csv", csv.name);
        self.add(&name, csv.buf.into_bytes());
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("artifact serializes");
        bytes.push(b'\n');
        self.add(name, bytes);
    }

    pub fn files(&self) -> &[(String, Vec<u8>)] {
        &self.files
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        self.summary.push_str(&format!("{key:<24} {value}\n"));
    }
}

/// CSV with a `# schema: apdim.<name>.v1 columns=...` first line.
#[derive(Clone, Debug)]
pub struct Csv {
    name: String,
    columns: usize,
    buf: String,
}

impl Csv {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        let cols = columns.join(",");
        Csv { name: name.to_string(), columns: columns.len(), buf: format!("{SCHEMA_PREFIX}apdim.{name}.v1 columns={cols}\n{cols}\n") }
    }

    /// Schema line only, so that gnuplot reads the file directly.
    pub fn headerless(name: &str, columns: &[&str]) -> Self {
        let cols = columns.join(",");
        Csv { name: name.to_string(), columns: columns.len(), buf: format!("{SCHEMA_PREFIX}apdim.{name}.v1 columns={cols}\n") }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }
}

/// Deterministic float formatting (shortest round-trip).
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

/// A parsed schema-declared CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemaCsv {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl SchemaCsv {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let first = lines.next().unwrap_or_default();
        let decl = first
            .strip_prefix(SCHEMA_PREFIX)
            .ok_or_else(|| Error::Validation("CSV does not declare a schema".into()))?;
        let (schema, cols) = decl
            .split_once(" columns=")
            .ok_or_else(|| Error::Validation(format!("malformed schema line {first:?}")))?;
        let columns: Vec<String> = cols.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.starts_with('#') && !l.is_empty()) {
            let fields: Vec<String> = line.split(',').map(str::to_string).collect();
            if fields == columns {
                continue;
            }
            if fields.len() != columns.len() {
                return Err(Error::Parse(format!("row {line:?} does not match {} columns", columns.len())));
            }
            rows.push(fields);
        }
        Ok(SchemaCsv { schema: schema.to_string(), columns, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Validation(format!("schema {} has no column {name}", self.schema)))
    }
}
