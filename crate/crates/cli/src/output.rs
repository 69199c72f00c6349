//! Tabular output in text, CSV or JSON.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

/// Output format of a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// One table cell.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(i128),
    Big(String),
    Float(f64),
    Text(String),
    Bool(bool),
}

/// `x` rounded to 15 significant digits.
fn round15(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.14e}").parse().unwrap_or(x)
    } else {
        x
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(x) => x.to_string(),
            Cell::Big(s) | Cell::Text(s) => s.clone(),
            Cell::Float(x) => round15(*x).to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(x) => i64::try_from(*x).map_or_else(|_| Value::String(x.to_string()), Value::from),
            Cell::Big(s) => s.parse::<u64>().map_or_else(|_| Value::String(s.clone()), Value::from),
            Cell::Float(x) => serde_json::Number::from_f64(round15(*x)).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x.into())
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x.into())
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// Named columns and rows of cells.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn text(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
        if self.rows.len() == 1 {
            let width = self.columns.iter().map(String::len).max().unwrap_or(0);
            return self
                .columns
                .iter()
                .zip(&cells[0])
                .map(|(c, v)| format!("{c:<width$} = {v}\n"))
                .collect();
        }
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| cells.iter().map(|r| r[j].len()).chain([self.columns[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |vals: &[String]| -> String {
            let parts: Vec<String> = vals.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect();
            format!("{}\n", parts.join("  ").trim_end())
        };
        let mut out = line(&self.columns);
        for r in &cells {
            out.push_str(&line(r));
        }
        out
    }

    fn csv(&self, invocation: &str) -> std::io::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        let body = w.into_inner().map_err(|e| e.into_error())?;
        Ok(format!("# {invocation}\n{}", String::from_utf8_lossy(&body)))
    }

    fn json(&self, invocation: &str) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                Value::Object(m)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("invocation".into(), Value::String(invocation.into()));
        doc.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).unwrap_or_default();
        s.push('\n');
        s
    }

    /// Render and write to `out`, or stdout.
    pub fn emit(&self, format: Format, out: Option<&Path>, invocation: &str) -> std::io::Result<()> {
        let body = match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(invocation)?,
            Format::Json => self.json(invocation),
        };
        match out {
            Some(p) => std::fs::write(p, body),
            None => std::io::stdout().write_all(body.as_bytes()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(Cell::Float(1.0 / 3.0).render(), "0.333333333333333");
        assert_eq!(Cell::Float(2.0).render(), "2");
    }

    #[test]
    fn csv_has_comment_and_header() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![Cell::Int(1), Cell::Text("x,y".into())]);
        let s = t.csv("zonolimit count").unwrap();
        assert_eq!(s, "# zonolimit count\na,b\n1,\"x,y\"\n");
    }

    #[test]
    fn big_counts_stay_exact_in_json() {
        let big = "123456789012345678901234567890".to_string();
        assert_eq!(Cell::Big(big.clone()).json(), Value::String(big));
        assert_eq!(Cell::Big("5".into()).json(), Value::from(5u64));
    }
}
