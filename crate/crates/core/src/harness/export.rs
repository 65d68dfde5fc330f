use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "jsonl",
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Str(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    pub fn to_text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => round12(*f).to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(f) => Number::from_f64(round12(*f)).map_or(Value::Null, Value::Number),
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }

    fn from_text(s: &str) -> Cell {
        if s.is_empty() {
            Cell::Empty
        } else if let Ok(i) = s.parse::<i64>() {
            Cell::Int(i)
        } else if let Ok(f) = s.parse::<f64>() {
            Cell::Float(f)
        } else {
            Cell::Str(s.into())
        }
    }

    fn from_json(v: &Value) -> Cell {
        match v {
            Value::Null => Cell::Empty,
            Value::Number(n) => n.as_i64().map_or_else(|| Cell::Float(n.as_f64().unwrap_or(f64::NAN)), Cell::Int),
            Value::String(s) => Cell::Str(s.clone()),
            other => Cell::Str(other.to_string()),
        }
    }

    /// Equality up to the int/float spelling of whole numbers.
    pub fn same(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Int(a), Cell::Float(b)) | (Cell::Float(b), Cell::Int(a)) => *a as f64 == round12(*b),
            (Cell::Float(a), Cell::Float(b)) => round12(*a) == round12(*b),
            _ => self == other,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Str(v.to_string())
    }
}

/// A header plus rows, exported with a fixed column order.
#[derive(Clone, Debug, PartialEq)]
pub struct Rows {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Rows {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn same(&self, other: &Rows) -> bool {
        self.header == other.header
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same(y)))
    }

    pub fn to_bytes(&self, format: Format) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(Cell::to_text))?;
                }
                w.flush()?;
            }
            Format::Json => {
                for r in &self.rows {
                    let obj: Map<String, Value> =
                        self.header.iter().cloned().zip(r.iter().map(Cell::to_json)).collect();
                    serde_json::to_writer(&mut buf, &Value::Object(obj))?;
                    buf.push(b'\n');
                }
            }
        }
        Ok(buf)
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        let mut f = BufWriter::new(File::create(path)?);
        f.write_all(&self.to_bytes(format)?)?;
        f.flush()?;
        Ok(())
    }

    /// Reads back a file written by [`Rows::write`]. JSON lines carry no
    /// header, so the expected one must be supplied.
    pub fn read(path: &Path, format: Format, header: &[&str]) -> Result<Rows> {
        let mut out = Rows::new(header);
        match format {
            Format::Csv => {
                let mut r = csv::Reader::from_path(path)?;
                out.header = r.headers()?.iter().map(String::from).collect();
                for rec in r.records() {
                    out.rows.push(rec?.iter().map(Cell::from_text).collect());
                }
            }
            Format::Json => {
                for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let v: Value = serde_json::from_str(&line)?;
                    let obj = v.as_object().ok_or_else(|| Error::Parse {
                        line: i + 1,
                        msg: "expected a JSON object".into(),
                    })?;
                    out.rows.push(
                        out.header
                            .iter()
                            .map(|h| obj.get(h).map_or(Cell::Empty, Cell::from_json))
                            .collect(),
                    );
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(round12(-2.5e-13).to_string(), "-0.00000000000025");
        assert_eq!(round12(-0.0).to_string(), "0");
    }

    #[test]
    fn header_only_when_empty() {
        let rows = Rows::new(&["iteration", "gamma", "potential", "queries"]);
        assert_eq!(rows.to_bytes(Format::Csv).unwrap(), b"iteration,gamma,potential,queries\n");
        assert!(rows.to_bytes(Format::Json).unwrap().is_empty());
    }

    #[test]
    fn csv_json_round_trip() {
        let header = ["iteration", "gamma", "potential", "queries"];
        let mut rows = Rows::new(&header);
        rows.push(vec![0usize.into(), Cell::opt(Some(0.123456789012345)), 1.0.into(), 3usize.into()]);
        rows.push(vec![1usize.into(), Cell::Empty, 0.25.into(), 7usize.into()]);
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("t.csv");
        let b = dir.path().join("t.jsonl");
        rows.write(&a, Format::Csv).unwrap();
        rows.write(&b, Format::Json).unwrap();
        let ra = Rows::read(&a, Format::Csv, &header).unwrap();
        let rb = Rows::read(&b, Format::Json, &header).unwrap();
        assert!(ra.same(&rb));
        assert!(ra.same(&rows));
    }
}
