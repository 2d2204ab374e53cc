//! Report tables, their CSV/JSON encodings, and plot data files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use adelic_core::arith::BigRat;
use adelic_core::arith::integer::rat_to_f64;
use adelic_core::berkovich::LogP;
use adelic_core::heights::{LocalPairing, PairingValue};
use serde::Serialize;
use serde_json::{Map, Value, json};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    /// Integer parameter identifying the row (sizes, primes, indices).
    Key,
    Text,
    Flag,
    /// Exact rational.
    Exact,
    /// Exact rational multiple of `log p`.
    ExactLog,
    /// Floating-point value with an absolute error bound.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn new(name: &str, kind: ColumnKind) -> Self {
        Column { name: name.to_string(), kind }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Key(i64),
    Text(String),
    Flag(bool),
    Exact(BigRat),
    ExactLog(LogP),
    Numeric { value: f64, tol: f64 },
    /// No value for this row; written as blank CSV fields and JSON `null`.
    Empty,
}

impl Cell {
    pub fn num(value: f64, tol: f64) -> Self {
        Cell::Numeric { value, tol }
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn pairing(p: &LocalPairing) -> Self {
        match &p.value {
            PairingValue::Exact(l) => Cell::ExactLog(l.clone()),
            PairingValue::Numeric { value, tol } => Cell::num(*value, *tol),
        }
    }

    pub fn kind(&self) -> Option<ColumnKind> {
        Some(match self {
            Cell::Key(_) => ColumnKind::Key,
            Cell::Text(_) => ColumnKind::Text,
            Cell::Flag(_) => ColumnKind::Flag,
            Cell::Exact(_) => ColumnKind::Exact,
            Cell::ExactLog(_) => ColumnKind::ExactLog,
            Cell::Numeric { .. } => ColumnKind::Numeric,
            Cell::Empty => return None,
        })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Cell::Numeric { .. })
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Key(k) => json!(k),
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
            Cell::Exact(q) => json!({ "exact": ratio_string(q), "f64": rat_to_f64(q) }),
            Cell::ExactLog(l) => json!({
                "exact": ratio_string(&l.coeff),
                "unit": format!("log {}", l.prime),
                "f64": l.to_f64(),
            }),
            Cell::Numeric { value, tol } => json!({ "value": value, "tol": tol }),
            Cell::Empty => Value::Null,
        }
    }

    fn csv_fields(&self, kind: ColumnKind, out: &mut Vec<String>) {
        match self {
            Cell::Empty => out.extend(std::iter::repeat_n(String::new(), csv_width(kind))),
            Cell::Key(k) => out.push(k.to_string()),
            Cell::Text(s) => out.push(s.clone()),
            Cell::Flag(b) => out.push(b.to_string()),
            Cell::Exact(q) => out.extend([ratio_string(q), fmt_f64(rat_to_f64(q)), "exact".into()]),
            Cell::ExactLog(l) => {
                out.extend([ratio_string(&l.coeff), fmt_f64(l.to_f64()), format!("exact*log({})", l.prime)])
            }
            Cell::Numeric { value, tol } => out.extend([fmt_f64(*value), fmt_f64(*tol)]),
        }
    }
}

/// `"a/b"` with `b ≥ 1` always written.
pub fn ratio_string(q: &BigRat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Shortest round-trip decimal with `.` separator.
pub fn fmt_f64(x: f64) -> String {
    // no negative zero in output
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:?}")
}

fn csv_width(kind: ColumnKind) -> usize {
    match kind {
        ColumnKind::Key | ColumnKind::Text | ColumnKind::Flag => 1,
        ColumnKind::Exact | ColumnKind::ExactLog => 3,
        ColumnKind::Numeric => 2,
    }
}

fn csv_header(columns: &[Column]) -> Vec<String> {
    let mut h = Vec::new();
    for c in columns {
        match c.kind {
            ColumnKind::Key | ColumnKind::Text | ColumnKind::Flag => h.push(c.name.clone()),
            ColumnKind::Exact | ColumnKind::ExactLog => {
                h.extend([c.name.clone(), format!("{}_f64", c.name), format!("{}_tol", c.name)])
            }
            ColumnKind::Numeric => h.extend([c.name.clone(), format!("{}_tol", c.name)]),
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub key: Vec<i64>,
    pub cells: Vec<Cell>,
}

/// A plot-ready table; no rendering happens here.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub name: String,
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

impl PlotData {
    pub fn new(name: &str, header: &[&str]) -> Self {
        PlotData { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), records: Vec::new() }
    }

    pub fn push(&mut self, record: Vec<String>) {
        debug_assert_eq!(record.len(), self.header.len());
        self.records.push(record);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowFailure {
    pub key: Vec<i64>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub config: ExperimentConfig,
    pub cli_version: &'static str,
    pub core_version: &'static str,
    pub seed: Option<u64>,
    pub failures: Vec<RowFailure>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub rows: Vec<(Vec<i64>, f64)>,
}

impl Timing {
    pub fn new(total: Duration) -> Self {
        Timing { total_seconds: total.as_secs_f64(), rows: Vec::new() }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub plots: Vec<PlotData>,
    pub metadata: Metadata,
    /// Wall-clock times; kept out of the main files so reruns compare byte for byte.
    pub timing: Timing,
}

impl ExperimentReport {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn cell(&self, row: usize, name: &str) -> Option<&Cell> {
        self.column_index(name).map(|i| &self.rows[row].cells[i])
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, cell) in self.columns.iter().zip(&r.cells) {
                    m.insert(c.name.clone(), cell.to_json());
                }
                Value::Object(m)
            })
            .collect();
        json!({
            "kind": self.kind,
            "columns": self.columns,
            "rows": rows,
            "metadata": self.metadata,
        })
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(csv_header(&self.columns))?;
        for r in &self.rows {
            let mut fields = Vec::new();
            for (col, c) in self.columns.iter().zip(&r.cells) {
                c.csv_fields(col.kind, &mut fields);
            }
            w.write_record(&fields)?;
        }
        w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
    }

    /// Writes `<stem>.csv`, `<stem>.json` and `<stem>.timing.json`; returns the paths.
    pub fn write(&self, dir: &Path, stem: &str) -> CliResult<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.into(), source })?;
        let csv_path = dir.join(format!("{stem}.csv"));
        write_file(&csv_path, &self.to_csv()?)?;
        let json_path = dir.join(format!("{stem}.json"));
        let mut text = serde_json::to_string_pretty(&self.to_json())?;
        text.push('\n');
        write_file(&json_path, text.as_bytes())?;
        let timing_path = dir.join(format!("{stem}.timing.json"));
        write_file(&timing_path, serde_json::to_string_pretty(&self.timing)?.as_bytes())?;
        Ok(vec![csv_path, json_path, timing_path])
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Write { path: path.into(), source })
}

/// One CSV per plot table, named `<stem>_<plot>.csv`.
pub fn emit_plotdata(report: &ExperimentReport, dir: &Path, stem: &str) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.into(), source })?;
    let mut paths = Vec::new();
    for plot in &report.plots {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&plot.header)?;
        for r in &plot.records {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
        let path = dir.join(format!("{stem}_{}.csv", plot.name));
        write_file(&path, &bytes)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use adelic_core::arith::rat;

    #[test]
    fn csv_expands_tags() {
        let cols = vec![
            Column::new("n", ColumnKind::Key),
            Column::new("q", ColumnKind::Exact),
            Column::new("e", ColumnKind::ExactLog),
            Column::new("x", ColumnKind::Numeric),
        ];
        assert_eq!(csv_header(&cols), ["n", "q", "q_f64", "q_tol", "e", "e_f64", "e_tol", "x", "x_tol"]);
        let mut f = Vec::new();
        Cell::Exact(rat(-1, 2)).csv_fields(ColumnKind::Exact, &mut f);
        Cell::Exact(rat(3, 1)).csv_fields(ColumnKind::Exact, &mut f);
        Cell::num(0.1, 1e-12).csv_fields(ColumnKind::Numeric, &mut f);
        Cell::Empty.csv_fields(ColumnKind::Numeric, &mut f);
        assert_eq!(f, ["-1/2", "-0.5", "exact", "3/1", "3.0", "exact", "0.1", "1e-12", "", ""]);
    }
}
