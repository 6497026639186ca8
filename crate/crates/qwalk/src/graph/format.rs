//! Line-oriented text format:
//!
//! ```text
//! # comment
//! graph 4
//! label 0 00
//! mark 1 -
//! edge 0 1 1.0 +
//! ```

use std::fmt::Write;

use thiserror::Error;

use super::{BitLabel, Graph, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("missing `graph <vertex_count>` header")]
    MissingHeader,
}

fn at(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Line {
        line,
        reason: reason.into(),
    }
}

fn parse_sign(tok: &str, line: usize) -> Result<Sign, ParseError> {
    match tok {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        _ => Err(at(line, format!("expected `+` or `-`, got {tok:?}"))),
    }
}

fn parse_index(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| at(line, format!("invalid vertex index {tok:?}")))
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut graph: Option<Graph> = None;
    let mut labels: Vec<Option<BitLabel>> = Vec::new();
    let mut marks: Vec<Option<Sign>> = Vec::new();
    let mut label_line = 0;
    let mut mark_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match (toks[0], graph.as_mut()) {
            ("graph", None) => {
                if toks.len() != 2 {
                    return Err(at(line, "expected `graph <vertex_count>`"));
                }
                let n: usize = toks[1]
                    .parse()
                    .map_err(|_| at(line, format!("invalid vertex count {:?}", toks[1])))?;
                graph = Some(Graph::new(n).map_err(|e| at(line, e.to_string()))?);
                labels = vec![None; n];
                marks = vec![None; n];
            }
            ("graph", Some(_)) => return Err(at(line, "repeated `graph` header")),
            (_, None) => return Err(ParseError::MissingHeader),
            ("label", Some(g)) => {
                if toks.len() != 3 {
                    return Err(at(line, "expected `label <index> <bits>`"));
                }
                let v = parse_index(toks[1], line)?;
                if v >= g.vertex_count() {
                    return Err(at(line, format!("vertex {v} out of range")));
                }
                let l: BitLabel = toks[2]
                    .parse()
                    .map_err(|e: super::LabelError| at(line, e.to_string()))?;
                if labels[v].replace(l).is_some() {
                    return Err(at(line, format!("vertex {v} labelled twice")));
                }
                label_line = line;
            }
            ("mark", Some(g)) => {
                if toks.len() != 3 {
                    return Err(at(line, "expected `mark <index> +|-`"));
                }
                let v = parse_index(toks[1], line)?;
                if v >= g.vertex_count() {
                    return Err(at(line, format!("vertex {v} out of range")));
                }
                if marks[v].replace(parse_sign(toks[2], line)?).is_some() {
                    return Err(at(line, format!("vertex {v} marked twice")));
                }
                mark_line = line;
            }
            ("edge", Some(g)) => {
                if toks.len() != 5 {
                    return Err(at(line, "expected `edge <u> <v> <weight> <+|->`"));
                }
                let u = parse_index(toks[1], line)?;
                let v = parse_index(toks[2], line)?;
                let w: f64 = toks[3]
                    .parse()
                    .map_err(|_| at(line, format!("invalid weight {:?}", toks[3])))?;
                let s = parse_sign(toks[4], line)?;
                g.add_edge(u, v, w, s)
                    .map_err(|e| at(line, e.to_string()))?;
            }
            (other, Some(_)) => return Err(at(line, format!("unknown directive {other:?}"))),
        }
    }

    let mut g = graph.ok_or(ParseError::MissingHeader)?;
    if labels.iter().any(Option::is_some) {
        let all: Option<Vec<BitLabel>> = labels.into_iter().collect();
        let all =
            all.ok_or_else(|| at(label_line, "labels must be given for every vertex or none"))?;
        g.set_labels(all)
            .map_err(|e| at(label_line, e.to_string()))?;
    }
    if marks.iter().any(Option::is_some) {
        let all: Option<Vec<Sign>> = marks.into_iter().collect();
        let all =
            all.ok_or_else(|| at(mark_line, "marks must be given for every vertex or none"))?;
        g.set_markings(all)
            .map_err(|e| at(mark_line, e.to_string()))?;
    }
    Ok(g)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {}", g.vertex_count());
    if let Some(labels) = g.labels() {
        for (v, l) in labels.iter().enumerate() {
            let _ = writeln!(out, "label {v} {l}");
        }
    }
    if let Some(marks) = g.markings() {
        for (v, m) in marks.iter().enumerate() {
            let _ = writeln!(out, "mark {v} {m}");
        }
    }
    for e in g.edges() {
        let _ = writeln!(out, "edge {} {} {} {}", e.u, e.v, e.weight, e.sign);
    }
    out
}
