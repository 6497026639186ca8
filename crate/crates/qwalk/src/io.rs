//! Fixed-format tables for CSV and JSON output, and graph lookup by name or
//! file.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::graph::{parse_graph, Graph, GraphError, ParseError};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("unknown graph {0:?}: expect k<n>, p<n>, c<n>, q<k> or a file")]
    UnknownGraph(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

/// `x` with 12 significant digits, trailing zeros trimmed. −0 prints as 0,
/// non-finite values as `nan`, `inf`, `-inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => format_number(*x)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Key/value metadata followed by a table. Keys and rows keep insertion
/// order in both encodings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
        self
    }

    /// Comment lines (`# key value`), header, then one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# qwalk {}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} {}", v.csv());
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut meta = Map::new();
        for (k, v) in &self.meta {
            meta.insert(k.clone(), v.json());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    obj.insert(c.clone(), v.json());
                }
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), Value::Object(meta));
        top.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serialisable");
        s.push('\n');
        s
    }
}

/// CSV body as read back: comment lines skipped, header, then text cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }
}

pub fn read_csv(text: &str) -> Result<CsvTable, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(IoError::Csv {
        line: 0,
        reason: "missing header".into(),
    })?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (no, line) in lines {
        let cells: Vec<String> = line.split(',').map(str::to_string).collect();
        if cells.len() != columns.len() {
            return Err(IoError::Csv {
                line: no + 1,
                reason: format!("{} cells, expected {}", cells.len(), columns.len()),
            });
        }
        rows.push(cells);
    }
    Ok(CsvTable { columns, rows })
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_graph_file(path: &Path) -> Result<Graph, IoError> {
    parse_graph(&read_text(path)?).map_err(|source| IoError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// `k<n>`, `p<n>`, `c<n>`, `q<k>` name complete graphs, paths, cycles and
/// hypercubes; anything else is read as a graph file.
pub fn resolve_graph(spec: &str) -> Result<Graph, IoError> {
    let builtin = spec
        .char_indices()
        .nth(1)
        .and_then(|(i, _)| spec[i..].parse::<usize>().ok().map(|n| (&spec[..i], n)));
    match builtin {
        Some(("k", n)) => Ok(Graph::complete(n)?),
        Some(("p", n)) => Ok(Graph::path(n)?),
        Some(("c", n)) => Ok(Graph::cycle(n)?),
        Some(("q", k)) => Ok(Graph::hypercube(
            u32::try_from(k).map_err(|_| GraphError::TooLarge(u32::MAX))?,
        )?),
        _ if Path::new(spec).exists() => parse_graph_file(Path::new(spec)),
        _ => Err(IoError::UnknownGraph(spec.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(-1e-30), "-1e-30");
        assert_eq!(format_number(std::f64::consts::FRAC_PI_2), "1.57079632679");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.999999999999999), "1");
        assert_eq!(format_number(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_number(0.00001234), "0.00001234");
        assert_eq!(format_number(-2.5e-7), "-2.5e-7");
        assert_eq!(format_number(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_round_trip() {
        let mut r = Report::new(&["t", "magnitude", "phase"]);
        r.meta("graph", "k2");
        assert_eq!(read_csv(&r.to_csv()).unwrap().rows.len(), 0);
        let xs: Vec<f64> = (0..50)
            .map(|i| (i as f64 * 0.37).sin() * 10f64.powi(i % 9 - 4))
            .collect();
        for (i, x) in xs.iter().enumerate() {
            r.row(vec![(i as f64 * 0.1).into(), x.abs().into(), (-x).into()]);
        }
        let back = read_csv(&r.to_csv()).unwrap();
        let t = back.column("t").unwrap();
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        for (x, y) in xs.iter().zip(back.column("phase").unwrap()) {
            assert!((x + y).abs() <= 1e-11 * x.abs());
        }
        assert!(matches!(
            read_csv("a,b\n1\n"),
            Err(IoError::Csv { line: 2, .. })
        ));
    }

    #[test]
    fn json_keeps_order() {
        let mut r = Report::new(&["z", "a"]);
        r.meta("zeta", 1.0).meta("alpha", Cell::Empty);
        r.row(vec![Cell::Int(3), (-0.0).into()]);
        let s = r.to_json();
        assert!(s.find("zeta").unwrap() < s.find("alpha").unwrap());
        assert!(s.find("\"z\"").unwrap() < s.find("\"a\"").unwrap());
        assert!(s.contains("\"alpha\": null"));
    }

    #[test]
    fn builtin_graphs() {
        assert_eq!(resolve_graph("k2").unwrap().edge_count(), 1);
        assert_eq!(resolve_graph("p5").unwrap().edge_count(), 4);
        assert_eq!(resolve_graph("c6").unwrap().edge_count(), 6);
        assert_eq!(resolve_graph("q3").unwrap().edge_count(), 12);
        assert!(matches!(resolve_graph("x3"), Err(IoError::UnknownGraph(_))));
        assert!(matches!(resolve_graph("k0"), Err(IoError::Graph(_))));
    }
}
