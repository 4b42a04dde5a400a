//! Tables and their CSV / JSON renderings.
//!
//! Floating-point values are printed with 17 significant digits
//! (`{:.16e}`), which round-trips every `f64`. The JSON writer keeps that
//! text verbatim, so both formats carry the same digits. Non-finite values
//! become empty CSV fields and JSON `null`.
//!
//! CSV output is a header row followed by one row per grid point. The
//! diagnostics go to standard error as one `# diagnostics {json}` line, which
//! keeps standard output a plain table. JSON output is the single object
//! `{"config": …, "rows": [{column: value, …}, …], "diagnostics": {…}}`.
//! Map keys are sorted, so equal inputs give byte-identical output.

use crate::args::Format;
use crate::error::CliResult;
use serde_json::{Map, Number, Value};
use std::io::Write;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// A floating-point value.
    Num(f64),
    /// An integer.
    Int(i64),
    /// A flag.
    Bool(bool),
    /// Free text.
    Text(String),
    /// No value (route unavailable, say).
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// `v` with 17 significant digits, or `None` when not finite.
pub fn fmt_f64(v: f64) -> Option<String> {
    v.is_finite().then(|| format!("{v:.16e}"))
}

/// `v` as a JSON number carrying exactly the digits of [`fmt_f64`].
pub fn json_f64(v: f64) -> Value {
    fmt_f64(v)
        .and_then(|t| t.parse::<Number>().ok())
        .map_or(Value::Null, Value::Number)
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v).unwrap_or_default(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json_f64(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(t) => Value::String(t.clone()),
            Cell::Missing => Value::Null,
        }
    }
}

/// A command's result: named columns, rows and diagnostics.
#[derive(Debug, Clone, Default)]
pub struct Table {
    /// Column names.
    pub columns: Vec<String>,
    /// Rows, each as long as `columns`.
    pub rows: Vec<Vec<Cell>>,
    /// Run-level diagnostics (`m_final`, `eps`, `route_discrepancy`, …).
    pub diagnostics: Map<String, Value>,
}

impl Table {
    /// An empty table with the given columns.
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    /// Appends a row.
    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Records a numeric diagnostic.
    pub fn diag_f64(&mut self, key: &str, v: f64) {
        self.diagnostics.insert(key.into(), json_f64(v));
    }

    /// Records any diagnostic.
    pub fn diag(&mut self, key: &str, v: impl Into<Value>) {
        self.diagnostics.insert(key.into(), v.into());
    }

    /// Writes the table in `format`; CSV diagnostics go to `diag_out`.
    pub fn write(
        &self,
        format: Format,
        config: &Value,
        out: &mut impl Write,
        diag_out: &mut impl Write,
    ) -> CliResult<()> {
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", line.join(","))?;
                }
                if !self.diagnostics.is_empty() {
                    writeln!(diag_out, "# diagnostics {}", Value::Object(self.diagnostics.clone()))?;
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        Value::Object(self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect())
                    })
                    .collect();
                let mut doc = Map::new();
                doc.insert("config".into(), config.clone());
                doc.insert("rows".into(), Value::Array(rows));
                doc.insert("diagnostics".into(), Value::Object(self.diagnostics.clone()));
                serde_json::to_writer_pretty(&mut *out, &Value::Object(doc)).map_err(std::io::Error::from)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(t: &Table, f: Format) -> (String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        t.write(f, &Value::Null, &mut out, &mut err).unwrap();
        (String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn floats_round_trip_through_both_formats() {
        let v = 0.1 + 0.2;
        assert_eq!(fmt_f64(v).unwrap().parse::<f64>().unwrap(), v);
        assert_eq!(json_f64(v).to_string(), fmt_f64(v).unwrap());
        assert_eq!(json_f64(f64::NAN), Value::Null);
    }

    #[test]
    fn csv_has_a_header_and_quoted_text() {
        let mut t = Table::new(["x", "note", "p"]);
        t.push(vec![1.0.into(), "a,b".into(), Cell::Missing]);
        t.diag("m_final", 16);
        let (out, err) = render(&t, Format::Csv);
        assert_eq!(out, "x,note,p\n1.0000000000000000e0,\"a,b\",\n");
        assert_eq!(err, "# diagnostics {\"m_final\":16}\n");
    }

    #[test]
    fn json_rows_are_objects_keyed_by_column() {
        let mut t = Table::new(["n", "ok"]);
        t.push(vec![3usize.into(), true.into()]);
        let (out, _) = render(&t, Format::Json);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rows"][0]["n"], 3);
        assert_eq!(v["rows"][0]["ok"], true);
        assert!(v["diagnostics"].is_object());
    }
}
