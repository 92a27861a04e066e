//! Machine-readable experiment output: one report.json per run plus
//! plot-ready CSV tables. Cell maps use sorted keys and cells are emitted
//! in sorted grid order, so identical configs reproduce identical bytes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

pub type Cell = BTreeMap<String, Value>;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub library_version: String,
    /// multiplier applied to raw distances at load time
    pub normalization_factor: f64,
    /// finiteness on a single finite instance is judged by bounded growth
    /// of the computed constant under refinement, never asserted absolutely
    pub finiteness_proxy: String,
    pub summary: Cell,
    pub cells: Vec<Cell>,
}

impl Report {
    pub fn new(experiment: &str, config_hash: String, seed: u64, normalization: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            config_hash,
            seed,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            normalization_factor: normalization,
            finiteness_proxy:
                "a cell counts as finite when the constant grows by a factor < 1.5 per refinement doubling"
                    .to_string(),
            summary: Cell::new(),
            cells: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializable")
    }

    pub fn write_json(&self, dir: &Path) -> anyhow::Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut f = std::fs::File::create(dir.join("report.json"))?;
        f.write_all(self.to_json().as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn cell_entry(pairs: &[(&str, Value)]) -> Cell {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Null => "nan".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Writes a CSV with the given column order, pulling each column from the
/// cell maps (missing keys become empty fields).
pub fn write_csv(path: &Path, columns: &[&str], cells: &[Cell]) -> anyhow::Result<()> {
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for cell in cells {
        let row: Vec<String> = columns
            .iter()
            .map(|c| cell.get(*c).map(fmt_value).unwrap_or_default())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
