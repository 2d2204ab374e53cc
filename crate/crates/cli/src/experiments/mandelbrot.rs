use adelic_core::complex::TestFunctionC;
use adelic_core::dynamics::{critical_param_cloud, critical_root_mean};
use num_complex::Complex64;

use super::{Experiment, TaskOutput, cloud_plot, key_cell, mean_of, test_function};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::report::{Cell, Column, ColumnKind, PlotData, Row, fmt_f64};

/// Roots of `P_c^n(0)` against the cloud at a deeper reference level.
pub struct Mandelbrot {
    degree: usize,
    ns: Vec<usize>,
    reference_n: usize,
    functions: Vec<TestFunctionC>,
    reference: Vec<f64>,
    tol: f64,
}

impl Mandelbrot {
    pub fn new(c: &ExperimentConfig) -> CliResult<Self> {
        let p = &c.parameters;
        let degree = p.degree.unwrap_or(2);
        let tol = p.tol.unwrap_or(1e-10);
        let reference_n = p.reference_n.unwrap_or(12);
        let functions: Vec<TestFunctionC> = p.test_functions.iter().flatten().map(|s| test_function(s)).collect();
        let cloud: Vec<Complex64> = critical_param_cloud(degree, reference_n, tol)?.iter().map(|r| r.value()).collect();
        let reference = functions.iter().map(|f| mean_of(&cloud, f)).collect();
        Ok(Mandelbrot {
            degree,
            ns: (p.n_min.unwrap_or(2)..=p.n_max.unwrap_or(2)).collect(),
            reference_n,
            functions,
            reference,
            tol,
        })
    }
}

impl Experiment for Mandelbrot {
    type Task = usize;

    fn columns(&self) -> Vec<Column> {
        vec![
            Column::new("n", ColumnKind::Key),
            Column::new("function_index", ColumnKind::Key),
            Column::new("test_function", ColumnKind::Text),
            Column::new("size", ColumnKind::Key),
            Column::new("root_mean", ColumnKind::Exact),
            Column::new("cloud_mean_re", ColumnKind::Numeric),
            Column::new("lhs", ColumnKind::Numeric),
            Column::new("rate", ColumnKind::Numeric),
            Column::new("ratio", ColumnKind::Numeric),
        ]
    }

    fn tasks(&self) -> Vec<usize> {
        self.ns.clone()
    }

    fn key(&self, &n: &usize) -> Vec<i64> {
        vec![n as i64]
    }

    fn run(&self, &n: &usize) -> adelic_core::Result<TaskOutput> {
        let cloud: Vec<Complex64> = critical_param_cloud(self.degree, n, self.tol)?.iter().map(|r| r.value()).collect();
        let mean_exact = critical_root_mean(self.degree, n)?;
        let size = cloud.len();
        let cloud_mean = cloud.iter().sum::<Complex64>() / size as f64;
        let rate = super::rate(size);
        let mut out = TaskOutput::default();
        for (i, (phi, &reference)) in self.functions.iter().zip(&self.reference).enumerate() {
            let lhs = (mean_of(&cloud, phi) - reference).abs();
            let lip = phi.lipschitz_bound();
            let tol = 2.0 * self.tol * lip;
            out.rows.push(Row {
                key: vec![n as i64, i as i64],
                cells: vec![
                    key_cell(n),
                    key_cell(i),
                    Cell::text(phi.name()),
                    key_cell(size),
                    Cell::Exact(mean_exact.clone()),
                    Cell::num(cloud_mean.re, self.tol),
                    Cell::num(lhs, tol),
                    Cell::num(rate, f64::EPSILON * rate),
                    Cell::num(lhs / (lip * rate), tol / (lip * rate)),
                ],
            });
            out.summary.push(vec![
                n.to_string(),
                size.to_string(),
                phi.name().into(),
                fmt_f64(lhs),
                fmt_f64(lip * rate),
                fmt_f64(lhs / (lip * rate)),
            ]);
        }
        out.plots.push(cloud_plot(&format!("cloud_n{n}"), &cloud));
        Ok(out)
    }

    fn summary_plot(&self) -> PlotData {
        PlotData::new("rates", &["n", "size", "test_function", "lhs", "lip_times_rate", "ratio"])
    }

    fn notes(&self) -> Vec<String> {
        vec![format!("discrepancies are measured against the n = {} parameter cloud", self.reference_n)]
    }
}
