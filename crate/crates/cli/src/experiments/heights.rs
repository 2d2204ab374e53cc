use adelic_core::arith::IntPoly;
use adelic_core::dynamics::green::canonical_height_point_tol;
use adelic_core::dynamics::{ProjPoint, RationalMapQ, canonical_height_set};
use adelic_core::heights::{AlgebraicSet, Place, naive_height, naive_height_mahler, pairing_finite_sets};

use super::{Experiment, TaskOutput, key_cell};
use crate::config::{ExperimentConfig, parse_map, parse_place, parse_point, parse_poly};
use crate::error::CliResult;
use crate::report::{Cell, Column, ColumnKind, PlotData, Row, fmt_f64};

/// Accuracy declared for heights computed from cached complex roots.
const ROOT_HEIGHT_TOL: f64 = 1e-9;
const SET_HEIGHT_ITERATIONS: usize = 8;
const SET_HEIGHT_BUDGET_BITS: u64 = 1 << 14;

/// Naive, Mahler and canonical heights of rational points and algebraic sets.
pub struct HeightTable {
    map: Option<RationalMapQ>,
    points: Vec<(String, ProjPoint)>,
    polys: Vec<(String, IntPoly)>,
    tol: f64,
}

impl HeightTable {
    pub fn new(c: &ExperimentConfig) -> CliResult<Self> {
        let p = &c.parameters;
        Ok(HeightTable {
            map: p.map.as_deref().map(parse_map).transpose()?,
            points: p.points.iter().flatten().map(|s| Ok((s.clone(), parse_point(s)?))).collect::<CliResult<_>>()?,
            polys: p.polys.iter().flatten().map(|s| Ok((s.clone(), parse_poly(s)?))).collect::<CliResult<_>>()?,
            tol: p.tol.unwrap_or(1e-10),
        })
    }

    fn point_row(&self, i: usize) -> adelic_core::Result<Row> {
        let (label, x) = &self.points[i];
        let naive = x.naive_height();
        let mut cells = vec![
            Cell::Key(0),
            key_cell(i),
            Cell::text(label.clone()),
            Cell::num(naive, 4.0 * f64::EPSILON * naive.abs()),
            Cell::Empty,
        ];
        match &self.map {
            Some(r) => {
                let h = canonical_height_point_tol(r, x, self.tol)?;
                let y = r.apply(x);
                let hy = canonical_height_point_tol(r, &y, self.tol)?;
                let d = r.degree() as f64;
                cells.push(Cell::num(h, self.tol));
                cells.push(y.to_rat().map(Cell::Exact).unwrap_or(Cell::Empty));
                cells.push(Cell::num(hy - d * h, (d + 1.0) * self.tol));
            }
            None => cells.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
        }
        Ok(Row { key: vec![0, i as i64], cells })
    }

    fn set_row(&self, i: usize) -> adelic_core::Result<Row> {
        let (label, poly) = &self.polys[i];
        let f = AlgebraicSet::from_poly(poly)?;
        let canonical = match &self.map {
            Some(r) => {
                let e = canonical_height_set(r, &f, SET_HEIGHT_ITERATIONS, SET_HEIGHT_BUDGET_BITS)?;
                Cell::num(e.value, e.error_bound + ROOT_HEIGHT_TOL)
            }
            None => Cell::Empty,
        };
        Ok(Row {
            key: vec![1, i as i64],
            cells: vec![
                Cell::Key(1),
                key_cell(i),
                Cell::text(label.clone()),
                Cell::num(naive_height(&f)?, ROOT_HEIGHT_TOL),
                Cell::num(naive_height_mahler(&f)?, ROOT_HEIGHT_TOL),
                canonical,
                Cell::Empty,
                Cell::Empty,
            ],
        })
    }
}

impl Experiment for HeightTable {
    /// `(0, i)` for the i-th point, `(1, i)` for the i-th polynomial.
    type Task = (u8, usize);

    fn columns(&self) -> Vec<Column> {
        vec![
            Column::new("group", ColumnKind::Key),
            Column::new("index", ColumnKind::Key),
            Column::new("input", ColumnKind::Text),
            Column::new("naive_height", ColumnKind::Numeric),
            Column::new("mahler_height", ColumnKind::Numeric),
            Column::new("canonical_height", ColumnKind::Numeric),
            Column::new("image", ColumnKind::Exact),
            Column::new("invariance_residual", ColumnKind::Numeric),
        ]
    }

    fn tasks(&self) -> Vec<(u8, usize)> {
        (0..self.points.len()).map(|i| (0, i)).chain((0..self.polys.len()).map(|i| (1, i))).collect()
    }

    fn key(&self, &(g, i): &(u8, usize)) -> Vec<i64> {
        vec![g as i64, i as i64]
    }

    fn run(&self, &(g, i): &(u8, usize)) -> adelic_core::Result<TaskOutput> {
        let row = if g == 0 { self.point_row(i)? } else { self.set_row(i)? };
        let field = |c: &Cell| match c {
            Cell::Text(s) => s.clone(),
            Cell::Numeric { value, .. } => fmt_f64(*value),
            _ => String::new(),
        };
        let summary = vec![field(&row.cells[2]), field(&row.cells[3]), field(&row.cells[5])];
        Ok(TaskOutput { rows: vec![row], plots: Vec::new(), summary: vec![summary] })
    }

    fn summary_plot(&self) -> PlotData {
        PlotData::new("heights", &["input", "naive_height", "canonical_height"])
    }

    fn notes(&self) -> Vec<String> {
        match &self.map {
            Some(r) => vec![format!("canonical heights for the map {}", r.spec_string())],
            None => vec!["no map given; canonical heights omitted".into()],
        }
    }
}

/// Local pairings `([F_i], [F_j])_v` between algebraic sets.
pub struct PairingTable {
    polys: Vec<(String, IntPoly)>,
    places: Vec<Place>,
}

impl PairingTable {
    pub fn new(c: &ExperimentConfig) -> CliResult<Self> {
        let p = &c.parameters;
        Ok(PairingTable {
            polys: p.polys.iter().flatten().map(|s| Ok((s.clone(), parse_poly(s)?))).collect::<CliResult<_>>()?,
            places: p.places.iter().flatten().map(|s| parse_place(s)).collect::<CliResult<_>>()?,
        })
    }
}

fn place_key(v: Place) -> i64 {
    v.prime().map_or(0, |p| p as i64)
}

impl Experiment for PairingTable {
    type Task = (usize, usize, Place);

    fn columns(&self) -> Vec<Column> {
        vec![
            Column::new("i", ColumnKind::Key),
            Column::new("j", ColumnKind::Key),
            Column::new("place", ColumnKind::Text),
            Column::new("pairing_exact", ColumnKind::ExactLog),
            Column::new("pairing_numeric", ColumnKind::Numeric),
            Column::new("overlap", ColumnKind::Flag),
        ]
    }

    fn tasks(&self) -> Vec<(usize, usize, Place)> {
        let n = self.polys.len();
        let mut t = Vec::new();
        for i in 0..n {
            for j in i..n {
                for &v in &self.places {
                    t.push((i, j, v));
                }
            }
        }
        t
    }

    fn key(&self, &(i, j, v): &(usize, usize, Place)) -> Vec<i64> {
        vec![i as i64, j as i64, place_key(v)]
    }

    fn run(&self, task: &(usize, usize, Place)) -> adelic_core::Result<TaskOutput> {
        let &(i, j, v) = task;
        let f = AlgebraicSet::from_poly(&self.polys[i].1)?;
        let g = AlgebraicSet::from_poly(&self.polys[j].1)?;
        let overlap = i != j && f.meets(&g);
        let (exact, numeric) = if overlap {
            (Cell::Empty, Cell::Empty)
        } else {
            let p = pairing_finite_sets(&f, &g, v)?;
            match p.as_exact() {
                Some(l) => (Cell::ExactLog(l.clone()), Cell::Empty),
                None => (Cell::Empty, Cell::num(p.to_f64(), p.tol())),
            }
        };
        let value = match (&exact, &numeric) {
            (Cell::ExactLog(l), _) => fmt_f64(l.to_f64()),
            (_, Cell::Numeric { value, .. }) => fmt_f64(*value),
            _ => String::new(),
        };
        Ok(TaskOutput {
            rows: vec![Row {
                key: self.key(task),
                cells: vec![key_cell(i), key_cell(j), Cell::text(v.to_string()), exact, numeric, Cell::Flag(overlap)],
            }],
            plots: Vec::new(),
            summary: vec![vec![i.to_string(), j.to_string(), v.to_string(), value]],
        })
    }

    fn summary_plot(&self) -> PlotData {
        PlotData::new("pairings", &["i", "j", "place", "value"])
    }
}
