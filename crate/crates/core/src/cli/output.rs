use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Choi ordering and normalization used for every computed quantity.
pub const CONVENTION: &str = "choi ordering (output, reference); unnormalized |eta> = sum_n |n>|n>, Tr R = d";

/// One computation, as emitted in JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub inputs: serde_json::Value,
    pub distance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub bounds: BTreeMap<String, f64>,
    /// Certificate gap `dual − primal` of the reported distance.
    pub gap: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub quantities: BTreeMap<String, f64>,
    pub wall_time_s: f64,
    pub convention: String,
}

impl ResultRecord {
    pub fn new(command: &str, inputs: serde_json::Value, distance: f64, gap: f64) -> Self {
        Self {
            command: command.to_string(),
            label: None,
            inputs,
            distance,
            weights: None,
            bounds: BTreeMap::new(),
            gap,
            quantities: BTreeMap::new(),
            wall_time_s: 0.0,
            convention: CONVENTION.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        self.rows
            .iter()
            .map(|r| match &r[j] {
                Cell::Num(v) => Some(*v),
                Cell::Text(_) => None,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_number(*v),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Twelve significant digits, positional notation for moderate magnitudes and
/// exponent notation otherwise. Independent of locale.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, v)
    } else {
        sci
    }
}

/// Joins numbers with `;` for a single CSV cell.
pub fn join_numbers(v: &[f64]) -> String {
    v.iter().map(|x| format_number(*x)).collect::<Vec<_>>().join(";")
}
