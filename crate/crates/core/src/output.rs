//! Tabular CSV/JSON emission with provenance comment lines.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub config_hash: String,
    pub seed: u64,
    pub schema: String,
    /// Additional key/value notes (window choice, preset name, ...).
    pub notes: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(config_hash: &str, seed: u64, schema: &str) -> Self {
        Self {
            tool: format!("medrx {TOOL_VERSION}"),
            config_hash: config_hash.to_string(),
            seed,
            schema: schema.to_string(),
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, key: &str, value: impl ToString) -> Self {
        self.notes.push((key.to_string(), value.to_string()));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // Display prints the shortest string that parses back to the same f64
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, prov: &Provenance) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(out, "# tool: {}", prov.tool);
        let _ = writeln!(out, "# config_hash: {}", prov.config_hash);
        let _ = writeln!(out, "# seed: {}", prov.seed);
        let _ = writeln!(out, "# schema: {}", prov.schema);
        for (k, v) in &prov.notes {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?);
        Ok(out)
    }

    pub fn to_json(&self, prov: &Provenance, config: &impl Serialize) -> Result<String> {
        let rows: Vec<Vec<serde_json::Value>> = self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect();
        let notes: serde_json::Map<String, serde_json::Value> =
            prov.notes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let doc = json!({
            "provenance": {
                "tool": prov.tool,
                "config_hash": prov.config_hash,
                "seed": prov.seed,
                "schema": prov.schema,
                "notes": notes,
            },
            "config": config,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format, prov: &Provenance, config: &impl Serialize) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(prov),
            Format::Json => self.to_json(prov, config),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Parsed CSV: comment lines without the leading `# `, header, and records.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn parse_csv(text: &str) -> Result<ParsedCsv> {
    let comments = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim_start().to_string())
        .collect();
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let columns = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err)?;
    Ok(ParsedCsv { comments, columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_has_provenance_and_round_trips() {
        let mut t = Table::new(&["x", "name", "n", "opt"]);
        t.push(vec![Cell::Num(0.1 + 0.2), "a,b".into(), Cell::Int(7), Cell::Empty]);
        t.push(vec![Cell::Num(-1e-300), "plain".into(), Cell::Int(0), Cell::Num(f64::INFINITY)]);
        let prov = Provenance::new("abc", 3, "test/1").note("window", "flat-top");
        let text = t.to_csv(&prov).unwrap();
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed.comments[1], "config_hash: abc");
        assert_eq!(parsed.comments[4], "window: flat-top");
        assert_eq!(parsed.columns, t.columns);
        assert_eq!(parsed.rows[0][0].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(parsed.rows[0][1], "a,b");
        assert_eq!(parsed.rows[1][3].parse::<f64>().unwrap(), f64::INFINITY);
    }

    #[test]
    fn json_mirrors_rows() {
        let mut t = Table::new(&["x"]);
        t.push(vec![Cell::Num(2.5)]);
        let s = t.to_json(&Provenance::new("h", 1, "s"), &json!({"k": 1})).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["rows"][0][0], json!(2.5));
        assert_eq!(v["provenance"]["config_hash"], json!("h"));
    }

    proptest! {
        #[test]
        fn floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let mut t = Table::new(&["x"]);
            t.push(vec![Cell::Num(x)]);
            let text = t.to_csv(&Provenance::new("h", 0, "s")).unwrap();
            let back: f64 = parse_csv(&text).unwrap().rows[0][0].parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
