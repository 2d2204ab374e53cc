use adelic_core::arith::format_rat;
use adelic_core::dynamics::basilica_local_energy;

use super::{Experiment, TaskOutput, key_cell};
use crate::config::ExperimentConfig;
use crate::report::{Cell, Column, ColumnKind, PlotData, Row};

/// `P(T) = T² + 1/p`: coding oracle, discriminant valuation and the closed form.
pub struct Basilica {
    primes: Vec<u64>,
    ns: Vec<usize>,
}

impl Basilica {
    pub fn new(c: &ExperimentConfig) -> Self {
        let p = &c.parameters;
        let mut primes = p.primes.clone().unwrap_or_default();
        primes.sort_unstable();
        primes.dedup();
        Basilica { primes, ns: (p.n_min.unwrap_or(1)..=p.n_max.unwrap_or(1)).collect() }
    }
}

impl Experiment for Basilica {
    type Task = (u64, usize);

    fn columns(&self) -> Vec<Column> {
        vec![
            Column::new("prime", ColumnKind::Key),
            Column::new("n", ColumnKind::Key),
            Column::new("oracle", ColumnKind::ExactLog),
            Column::new("discriminant", ColumnKind::ExactLog),
            Column::new("closed_form", ColumnKind::ExactLog),
            Column::new("ratio_to_closed_form", ColumnKind::Exact),
            Column::new("agree", ColumnKind::Flag),
            Column::new("negative", ColumnKind::Flag),
        ]
    }

    fn tasks(&self) -> Vec<(u64, usize)> {
        self.primes.iter().flat_map(|&p| self.ns.iter().map(move |&n| (p, n))).collect()
    }

    fn key(&self, &(p, n): &(u64, usize)) -> Vec<i64> {
        vec![p as i64, n as i64]
    }

    fn run(&self, &(p, n): &(u64, usize)) -> adelic_core::Result<TaskOutput> {
        let r = basilica_local_energy(p, n)?;
        let summary = vec![
            p.to_string(),
            n.to_string(),
            format_rat(&r.oracle.coeff),
            format_rat(&r.discriminant.coeff),
            format_rat(&r.closed_form.coeff),
            format_rat(&r.ratio_to_closed_form),
        ];
        Ok(TaskOutput {
            rows: vec![Row {
                key: self.key(&(p, n)),
                cells: vec![
                    Cell::Key(p as i64),
                    key_cell(n),
                    Cell::ExactLog(r.oracle),
                    Cell::ExactLog(r.discriminant),
                    Cell::ExactLog(r.closed_form),
                    Cell::Exact(r.ratio_to_closed_form),
                    Cell::Flag(r.agree),
                    Cell::Flag(r.negative),
                ],
            }],
            plots: Vec::new(),
            summary: vec![summary],
        })
    }

    fn summary_plot(&self) -> PlotData {
        PlotData::new("coefficients", &["prime", "n", "oracle", "discriminant", "closed_form", "ratio_to_closed_form"])
    }

    fn notes(&self) -> Vec<String> {
        vec!["values are coefficients of log p".into()]
    }
}
