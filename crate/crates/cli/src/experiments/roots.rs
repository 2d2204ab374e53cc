use adelic_core::complex::{AtomicMeasureC, PointC, PotentialMeasureC, TestFunctionC, discrepancy_report};
use num_complex::Complex64;

use super::{Experiment, TaskOutput, key_cell, test_function};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::report::{Cell, Column, ColumnKind, PlotData, Row, fmt_f64};

/// `[μ_N]` against `λ` on the unit circle.
pub struct RootsOfUnity {
    sizes: Vec<usize>,
    functions: Vec<TestFunctionC>,
    constant: f64,
    lambda: PotentialMeasureC,
}

impl RootsOfUnity {
    pub fn new(c: &ExperimentConfig) -> CliResult<Self> {
        let p = &c.parameters;
        let mut sizes = p.sizes.clone().unwrap_or_default();
        sizes.sort_unstable();
        sizes.dedup();
        Ok(RootsOfUnity {
            sizes,
            functions: p.test_functions.iter().flatten().map(|s| test_function(s)).collect(),
            constant: p.constant.unwrap_or(1.0),
            lambda: PotentialMeasureC::lambda_circle(),
        })
    }
}

impl Experiment for RootsOfUnity {
    type Task = (usize, usize);

    fn columns(&self) -> Vec<Column> {
        vec![
            Column::new("n_points", ColumnKind::Key),
            Column::new("function_index", ColumnKind::Key),
            Column::new("test_function", ColumnKind::Text),
            Column::new("lhs", ColumnKind::Numeric),
            Column::new("rhs", ColumnKind::Numeric),
            Column::new("lipschitz", ColumnKind::Numeric),
            Column::new("rate", ColumnKind::Numeric),
            Column::new("ratio", ColumnKind::Numeric),
        ]
    }

    fn tasks(&self) -> Vec<(usize, usize)> {
        self.sizes.iter().flat_map(|&n| (0..self.functions.len()).map(move |i| (n, i))).collect()
    }

    fn key(&self, &(n, i): &(usize, usize)) -> Vec<i64> {
        vec![n as i64, i as i64]
    }

    fn run(&self, &(n, i): &(usize, usize)) -> adelic_core::Result<TaskOutput> {
        let phi = &self.functions[i];
        let f = AtomicMeasureC::uniform(
            (0..n).map(|j| PointC::Finite(Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64))),
        );
        let r = discrepancy_report(&f, 0.0, &self.lambda, "lambda_circle", phi, self.constant, 0, 0)?;
        // summation of n terms of size ≤ e² in double precision
        let sum_tol = 8.0 * n as f64 * f64::EPSILON;
        let rate = super::rate(n);
        let row = Row {
            key: self.key(&(n, i)),
            cells: vec![
                key_cell(n),
                key_cell(i),
                Cell::text(phi.name()),
                Cell::num(r.lhs, sum_tol),
                Cell::num(r.rhs, 1e-3 * r.rhs),
                Cell::num(r.lip, 1e-3 * r.lip),
                Cell::num(rate, f64::EPSILON * rate),
                Cell::num(r.ratio, sum_tol / (r.lip * rate) + 1e-3 * r.ratio),
            ],
        };
        Ok(TaskOutput {
            summary: vec![vec![n.to_string(), phi.name().into(), fmt_f64(r.lhs), fmt_f64(r.lip * rate), fmt_f64(r.ratio)]],
            rows: vec![row],
            plots: Vec::new(),
        })
    }

    fn summary_plot(&self) -> PlotData {
        PlotData::new("rates", &["n_points", "test_function", "lhs", "lip_times_rate", "ratio"])
    }
}
