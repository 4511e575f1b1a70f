//! Delimited tabular text with `#`-prefixed metadata lines.
//!
//! Every CLI artifact (reports, distance matrices, certificates) goes
//! through this writer so replays are byte-identical.

use crate::error::{Error, Result};
use crate::sample::FiniteMetricSpace;
use nalgebra::DMatrix;
use std::fmt::Write as _;

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            meta: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Shortest-roundtrip float formatting (deterministic per bit pattern).
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Persist a finite metric space: one metadata line with the size and
/// provenance, then the distance matrix rows.
pub fn metric_space_to_text(space: &FiniteMetricSpace) -> String {
    let mut t = Table::new(&["label", "row"]);
    t.meta("n", space.len());
    t.meta("provenance", &space.provenance);
    for (i, label) in space.labels.iter().enumerate() {
        let row: Vec<String> = (0..space.len()).map(|j| fmt_f64(space.d[(i, j)])).collect();
        t.row(vec![label.clone(), row.join(" ")]);
    }
    t.to_text()
}

/// Parse a metric space written by `metric_space_to_text`.
pub fn metric_space_from_text(text: &str) -> Result<FiniteMetricSpace> {
    let mut n = None;
    let mut provenance = String::new();
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some(v) = rest.strip_prefix("n: ") {
                n = Some(v.trim().parse::<usize>().map_err(|e| Error::Config(e.to_string()))?);
            } else if let Some(v) = rest.strip_prefix("provenance: ") {
                provenance = v.trim().to_string();
            }
            continue;
        }
        if line.starts_with("label,") || line.trim().is_empty() {
            continue;
        }
        let (label, rest) = line
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("bad row: {line}")))?;
        labels.push(label.to_string());
        let row: Vec<f64> = rest
            .split_whitespace()
            .map(|v| v.parse::<f64>().map_err(|e| Error::Config(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = n.ok_or_else(|| Error::Config("missing size metadata".into()))?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config("inconsistent matrix shape".into()));
    }
    let d = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(FiniteMetricSpace { labels, d, provenance })
}
