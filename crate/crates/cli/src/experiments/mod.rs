//! Experiment kinds and the parallel row runner.

mod basilica;
mod berkovich;
mod equidist;
mod heights;
mod mandelbrot;
mod roots;

use std::time::Instant;

use adelic_core::complex::TestFunctionC;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, CliResult};
use crate::report::{Cell, Column, ExperimentReport, Metadata, PlotData, Row, RowFailure, Timing, fmt_f64};

/// Everything one task contributes to a report.
#[derive(Debug, Default)]
pub struct TaskOutput {
    pub rows: Vec<Row>,
    pub plots: Vec<PlotData>,
    /// Records appended to the experiment's summary plot.
    pub summary: Vec<Vec<String>>,
}

pub trait Experiment: Sync {
    type Task: Sync;

    fn columns(&self) -> Vec<Column>;
    fn tasks(&self) -> Vec<Self::Task>;
    fn key(&self, task: &Self::Task) -> Vec<i64>;
    fn run(&self, task: &Self::Task) -> adelic_core::Result<TaskOutput>;
    /// Header-only summary plot; always written, even for an empty report.
    fn summary_plot(&self) -> PlotData;

    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Resolves `config`, runs every row and assembles the report. Row failures are
/// recorded in the metadata instead of aborting the run.
pub fn run(config: ExperimentConfig) -> CliResult<ExperimentReport> {
    let config = config.resolve()?;
    match config.kind {
        ExperimentKind::RootsOfUnity => execute(&config, roots::RootsOfUnity::new(&config)?),
        ExperimentKind::PeriodicPoints | ExperimentKind::Preimages => {
            execute(&config, equidist::Equidist::new(&config)?)
        }
        ExperimentKind::Mandelbrot => execute(&config, mandelbrot::Mandelbrot::new(&config)?),
        ExperimentKind::Basilica => execute(&config, basilica::Basilica::new(&config)),
        ExperimentKind::BerkovichDemo => execute(&config, berkovich::BerkovichDemo::new(&config)),
        ExperimentKind::HeightTable => execute(&config, heights::HeightTable::new(&config)?),
        ExperimentKind::PairingTable => execute(&config, heights::PairingTable::new(&config)?),
    }
}

fn execute<E: Experiment>(config: &ExperimentConfig, exp: E) -> CliResult<ExperimentReport> {
    let start = Instant::now();
    let tasks = exp.tasks();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    let outcomes: Vec<(adelic_core::Result<TaskOutput>, f64)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let t0 = Instant::now();
                let out = exp.run(t);
                (out, t0.elapsed().as_secs_f64())
            })
            .collect()
    });

    let columns = exp.columns();
    let mut rows = Vec::new();
    let mut plots = Vec::new();
    let mut summary = exp.summary_plot();
    let mut failures = Vec::new();
    let mut timing = Vec::new();
    for (task, (outcome, secs)) in tasks.iter().zip(outcomes) {
        let key = exp.key(task);
        timing.push((key.clone(), secs));
        match outcome {
            Ok(out) => {
                debug_assert!(out.rows.iter().all(|r| r.cells.len() == columns.len()));
                rows.extend(out.rows);
                plots.extend(out.plots);
                summary.records.extend(out.summary);
            }
            Err(e) => failures.push(RowFailure { key, message: e.to_string() }),
        }
    }
    rows.sort_by(|a, b| a.key.cmp(&b.key));
    plots.insert(0, summary);

    let mut notes = exp.notes();
    if config.verify {
        let checked = verify(&exp, &tasks, &rows)?;
        notes.push(format!("verify: {checked} exact cells recomputed and matched"));
    }
    let mut timing_report = Timing::new(start.elapsed());
    timing_report.rows = timing;
    Ok(ExperimentReport {
        kind: config.kind,
        columns,
        rows,
        plots,
        metadata: Metadata {
            config: config.clone(),
            cli_version: env!("CARGO_PKG_VERSION"),
            core_version: adelic_core::VERSION,
            seed: config.parameters.seed,
            failures,
            notes,
        },
        timing: timing_report,
    })
}

/// Reruns every task from scratch and compares the exact cells of its rows.
fn verify<E: Experiment>(exp: &E, tasks: &[E::Task], rows: &[Row]) -> CliResult<usize> {
    let mut checked = 0;
    for task in tasks {
        let key = exp.key(task);
        let Ok(fresh) = exp.run(task) else { continue };
        for r in fresh.rows {
            let Some(old) = rows.iter().find(|o| o.key == r.key) else {
                return Err(CliError::Verify(format!("row {:?} missing from the report", r.key)));
            };
            for (i, (a, b)) in old.cells.iter().zip(&r.cells).enumerate() {
                if a.is_exact() {
                    if a != b {
                        return Err(CliError::Verify(format!("task {key:?}, row {:?}, column {i}: {a:?} vs {b:?}", r.key)));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

pub(crate) fn test_function(name: &str) -> TestFunctionC {
    match name {
        "re" => TestFunctionC::re(),
        "im" => TestFunctionC::im(),
        "exp_re" => TestFunctionC::exp_re(),
        "bump" => TestFunctionC::bump(),
        "abs2_capped" => TestFunctionC::abs2_capped(),
        other => unreachable!("test function {other} passed validation"),
    }
}

/// Mean of `f` over `points`, summed in a fixed order.
pub(crate) fn mean_of(points: &[Complex64], f: &TestFunctionC) -> f64 {
    let total: f64 = points.iter().map(|&z| f.eval(z)).sum();
    total / points.len() as f64
}

/// Sample mean and its standard error.
pub(crate) fn mean_and_stderr(points: &[Complex64], f: &TestFunctionC) -> (f64, f64) {
    let m = mean_of(points, f);
    let var = points.iter().map(|&z| (f.eval(z) - m).powi(2)).sum::<f64>() / points.len() as f64;
    (m, (var / points.len() as f64).sqrt())
}

/// `log n / n`.
pub(crate) fn rate(n: usize) -> f64 {
    if n > 1 { (n as f64).ln() / n as f64 } else { 1.0 }
}

pub(crate) fn cloud_plot(name: &str, points: &[Complex64]) -> PlotData {
    let mut p = PlotData::new(name, &["re", "im"]);
    for z in points {
        p.push(vec![fmt_f64(z.re), fmt_f64(z.im)]);
    }
    p
}

pub(crate) fn key_cell(k: usize) -> Cell {
    Cell::Key(k as i64)
}
