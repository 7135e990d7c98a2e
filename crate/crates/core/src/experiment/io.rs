use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::GraphFormat;
use super::{RunError, RunResult};
use crate::graph::{Edge, Graph};

/// Twelve significant digits, so reruns diff cleanly.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.11e}")
    }
}

/// An in-memory CSV table with a header line.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// Reads a graph file. Edge lists may declare `# nodes: N`; adjacency files are square
/// CSV weight matrices and give an undirected graph when symmetric.
pub fn load_graph(path: &Path, format: GraphFormat) -> RunResult<Graph> {
    let text = fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    match format {
        GraphFormat::EdgeList => Ok(Graph::from_edge_list(&text)?),
        GraphFormat::Adjacency => {
            let numbered = read_numeric_rows(path, &text)?;
            let n = numbered.len();
            if let Some((line, r)) = numbered.iter().find(|(_, r)| r.len() != n) {
                return Err(RunError::Parse {
                    path: path.into(),
                    line: *line,
                    message: format!("expected {n} columns, found {}", r.len()),
                });
            }
            let rows: Vec<Vec<f64>> = numbered.into_iter().map(|(_, r)| r).collect();
            let symmetric = (0..n).all(|i| (0..n).all(|j| rows[i][j] == rows[j][i]));
            let mut edges = Vec::new();
            for (i, r) in rows.iter().enumerate() {
                for (j, &w) in r.iter().enumerate() {
                    if w != 0.0 && (!symmetric || i < j) {
                        edges.push(Edge { src: i, dst: j, weight: w });
                    }
                }
            }
            Ok(Graph::new(n, edges, !symmetric)?)
        }
    }
}

/// Numeric rows with their 1-based line numbers. A non-numeric first line is a header.
fn read_numeric_rows(path: &Path, text: &str) -> RunResult<Vec<(usize, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| RunError::Parse { path: path.into(), line: i + 1, message: e.to_string() })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(r) => rows.push((line, r)),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(RunError::Parse { path: path.into(), line, message: e.to_string() }),
        }
    }
    Ok(rows)
}

/// Reads a CSV with one signal per column and one row per node. A header line is optional.
pub fn load_signals(path: &Path, num_nodes: usize) -> RunResult<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    let rows = read_numeric_rows(path, &text)?;
    let width = rows.first().map_or(0, |(_, r)| r.len());
    if let Some((line, r)) = rows.iter().find(|(_, r)| r.len() != width) {
        return Err(RunError::Parse {
            path: path.into(),
            line: *line,
            message: format!("expected {width} columns, found {}", r.len()),
        });
    }
    if rows.len() != num_nodes {
        return Err(RunError::ShapeMismatch { path: path.into(), expected: num_nodes, found: rows.len() });
    }
    Ok((0..width).map(|c| rows.iter().map(|(_, r)| r[c]).collect()).collect())
}

/// Writes signals as columns `signal_0, signal_1, …`.
pub fn write_signals(signals: &[Vec<f64>]) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..signals.len()).map(|i| format!("signal_{i}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    let n = signals.first().map_or(0, Vec::len);
    for v in 0..n {
        let row: Vec<String> = signals.iter().map(|s| format_value(s[v])).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
