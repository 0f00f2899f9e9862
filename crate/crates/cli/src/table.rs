use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One table cell. Missing values (an absent exceptional-point branch) are `Empty`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Count(u64),
    Num(f64),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// The artifact of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<String, f64>,
}

/// Twelve significant digits, with `-0` printed as `0`.
pub fn fmt_num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

fn fmt_cell(c: &Cell) -> String {
    match c {
        Cell::Count(n) => n.to_string(),
        Cell::Num(v) => fmt_num(*v),
        Cell::Empty => String::new(),
    }
}

impl Table {
    pub fn new(command: &str, params: BTreeMap<String, String>, columns: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            params,
            columns,
            rows: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column; `Empty` cells are skipped.
    pub fn values(&self, name: &str) -> Vec<f64> {
        let Some(k) = self.column(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter_map(|r| match r[k] {
                Cell::Num(v) => Some(v),
                Cell::Count(n) => Some(n as f64),
                Cell::Empty => None,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# params: command=");
        out.push_str(&self.command);
        for (k, v) in &self.params {
            out.push_str(&format!(" {k}={v}"));
        }
        out.push('\n');
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(fmt_cell))
                .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("ascii"));
        for (k, v) in &self.summary {
            out.push_str(&format!("# summary: {k}={}\n", fmt_num(*v)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serialises");
        s.push('\n');
        s
    }
}
