use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// A numeric table written as CSV and embedded in the JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct TraceTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TraceTable {
    pub fn new(name: impl Into<String>, header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        TraceTable { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows }
    }

    /// Header `index, <header…>`, then one row per entry with 17 significant digits.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut head = vec!["index".to_string()];
        head.extend(self.header.iter().cloned());
        w.write_record(&head)?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(row.iter().map(|v| format!("{v:.16e}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Value>,
    pub version: String,
    pub seed: u64,
    /// Seconds since the Unix epoch; `null` under `--reproducible`.
    pub timestamp: Option<u64>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, results: Value, tables: &[TraceTable], seed: u64, reproducible: bool) -> Report {
        let traces = (!tables.is_empty()).then(|| {
            Value::Object(
                tables
                    .iter()
                    .map(|t| (t.name.clone(), json!({ "header": t.header, "rows": t.rows })))
                    .collect(),
            )
        });
        let timestamp = (!reproducible)
            .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
        Report {
            command: command.to_string(),
            inputs,
            results,
            traces,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes the report to `path`, or to stdout for `-`.
    pub fn write_json(&self, path: &str) -> Result<()> {
        let s = self.to_json()?;
        if path == "-" {
            std::io::stdout().write_all(s.as_bytes())?;
        } else {
            fs::write(path, s).with_context(|| format!("cannot write {path}"))?;
        }
        Ok(())
    }
}

/// Writes each table to `<dir>/<command>_<name>.csv`.
pub fn write_traces(dir: &Path, command: &str, tables: &[TraceTable]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for t in tables {
        t.write_csv(&dir.join(format!("{command}_{}.csv", t.name)))?;
    }
    Ok(())
}
