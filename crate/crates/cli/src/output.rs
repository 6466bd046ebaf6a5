//! Tables with provenance, written as CSV or JSON.

use std::io::{self, Write};

use serde_json::{json, Map, Value};

use crate::config::{Format, Resolved};

pub const TOOL: &str = "qbm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

pub struct Table {
    pub command: &'static str,
    pub columns: Vec<Column>,
    /// Row-major; every row has one value per column.
    pub rows: Vec<Vec<f64>>,
    /// Extra metadata, in insertion order for CSV.
    pub meta: Vec<(&'static str, Value)>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<Column>) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &'static str, value: Value) {
        self.meta.push((key, value));
    }

    pub fn write(&self, cfg: &Resolved, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(cfg, out),
            Format::Json => self.write_json(cfg, out),
        }
    }

    fn write_csv(&self, cfg: &Resolved, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# tool: {TOOL} {VERSION}")?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# config-sha256: {}", cfg.hash())?;
        writeln!(out, "# units: {}", units(cfg))?;
        for c in &self.columns {
            writeln!(out, "# column {}: {}", c.name, c.unit)?;
        }
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        let header: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| cell(v)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, cfg: &Resolved, out: &mut dyn Write) -> io::Result<()> {
        let mut meta = Map::new();
        meta.insert("tool".into(), json!(TOOL));
        meta.insert("version".into(), json!(VERSION));
        meta.insert("command".into(), json!(self.command));
        meta.insert("config_sha256".into(), json!(cfg.hash()));
        meta.insert("units".into(), json!(units(cfg)));
        meta.insert(
            "columns".into(),
            Value::Array(
                self.columns
                    .iter()
                    .map(|c| json!({"name": c.name, "unit": c.unit}))
                    .collect(),
            ),
        );
        for (k, v) in &self.meta {
            meta.insert((*k).into(), v.clone());
        }
        // Non-finite values have no JSON literal and are written as null.
        let data: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|&v| number(v)).collect()))
            .collect();
        serde_json::to_writer_pretty(&mut *out, &json!({"meta": meta, "data": data}))?;
        writeln!(out)
    }
}

/// Shortest round-trip text; exponent form outside `[1e-4, 1e15)`.
pub fn cell(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn units(cfg: &Resolved) -> String {
    let b = &cfg.bath;
    format!(
        "natural, hbar = {}, m = {}, gamma = zeta/m = {}; column gamma_t = gamma * t",
        b.hbar,
        b.mass,
        b.gamma()
    )
}
