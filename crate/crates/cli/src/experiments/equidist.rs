use adelic_core::arith::IntPoly;
use adelic_core::complex::TestFunctionC;
use adelic_core::dynamics::green::canonical_height_point_tol;
use adelic_core::dynamics::{ProjPoint, RationalMapQ, equilibrium_sample, periodic_points_report, preimages};
use num_complex::Complex64;

use super::{Experiment, TaskOutput, cloud_plot, key_cell, mean_and_stderr, mean_of, test_function};
use crate::config::{ExperimentConfig, ExperimentKind, parse_map, parse_point};
use crate::error::CliResult;
use crate::report::{Cell, Column, ColumnKind, PlotData, Row, fmt_f64};

const PREIMAGE_TOL: f64 = 1e-14;

/// Sets `F_n` attached to a map (periodic points or iterated preimages)
/// against a sampled equilibrium measure.
pub struct Equidist {
    kind: ExperimentKind,
    map: RationalMapQ,
    ns: Vec<usize>,
    functions: Vec<TestFunctionC>,
    /// `(mean, standard error)` of each test function under the sample.
    reference: Vec<(f64, f64)>,
    base: Option<ProjPoint>,
    base_height: f64,
    constant: f64,
    sample_size: usize,
}

/// The point set, its exact cardinality data and its canonical height.
struct Level {
    points: Vec<Complex64>,
    size: usize,
    collisions: usize,
    infinity: bool,
    height: (f64, f64),
}

impl Equidist {
    pub fn new(c: &ExperimentConfig) -> CliResult<Self> {
        let p = &c.parameters;
        let map = parse_map(p.map.as_deref().unwrap_or_default())?;
        let functions: Vec<TestFunctionC> = p.test_functions.iter().flatten().map(|s| test_function(s)).collect();
        let sample = equilibrium_sample(&map, p.depth.unwrap_or(30), p.samples.unwrap_or(1), p.seed.unwrap_or(0))?;
        let sample: Vec<Complex64> = sample.finite_points().collect();
        let reference = functions.iter().map(|f| mean_and_stderr(&sample, f)).collect();
        let tol = p.tol.unwrap_or(1e-12);
        let (base, base_height) = match &p.base_point {
            Some(s) if c.kind == ExperimentKind::Preimages => {
                let a = parse_point(s)?;
                let h = canonical_height_point_tol(&map, &a, tol)?;
                (Some(a), h)
            }
            _ => (None, 0.0),
        };
        Ok(Equidist {
            kind: c.kind,
            map,
            ns: (p.n_min.unwrap_or(1)..=p.n_max.unwrap_or(1)).collect(),
            functions,
            reference,
            base,
            base_height,
            constant: p.constant.unwrap_or(1.0),
            sample_size: sample.len(),
        })
    }

    fn periodic(&self, n: usize) -> adelic_core::Result<Level> {
        let rep = periodic_points_report(&self.map, n)?;
        let points = rep.set.roots()?.iter().map(|r| r.value()).collect();
        Ok(Level {
            points,
            size: rep.set.len(),
            collisions: rep.collisions,
            infinity: rep.set.contains_infinity(),
            height: (0.0, 0.0),
        })
    }

    fn preimage(&self, n: usize) -> adelic_core::Result<Level> {
        let a = self.base.as_ref().expect("preimage experiments carry a base point");
        let (x0, x1) = a.coords();
        let it = self.map.iterate(n)?;
        // R^n(z) = x0/x1  ⇔  x1·num_n(z) − x0·den_n(z) = 0
        let q = &it.num().scale(x1) - &it.den().scale(x0);
        let dn = it.degree();
        let infinity = q.degree() < dn;
        let sf = if q.degree() == 0 { IntPoly::one() } else { q.squarefree_part() };
        let size = sf.degree() + usize::from(infinity);
        let mut level = vec![a.to_rat().map(|r| Complex64::new(adelic_core::arith::integer::rat_to_f64(&r), 0.0))
            .expect("finite base point")];
        for _ in 0..n {
            let mut next = Vec::with_capacity(level.len() * self.map.degree());
            for z in &level {
                next.extend(preimages(&self.map, *z, PREIMAGE_TOL)?);
            }
            level = next;
        }
        let scale = (self.map.degree() as f64).powi(n as i32);
        Ok(Level {
            points: level,
            size,
            collisions: dn - size,
            infinity,
            height: (self.base_height / scale, 1e-12 / scale),
        })
    }
}

impl Experiment for Equidist {
    type Task = usize;

    fn columns(&self) -> Vec<Column> {
        vec![
            Column::new("n", ColumnKind::Key),
            Column::new("function_index", ColumnKind::Key),
            Column::new("test_function", ColumnKind::Text),
            Column::new("size", ColumnKind::Key),
            Column::new("collisions", ColumnKind::Key),
            Column::new("contains_infinity", ColumnKind::Flag),
            Column::new("height", ColumnKind::Numeric),
            Column::new("lhs", ColumnKind::Numeric),
            Column::new("rhs", ColumnKind::Numeric),
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
        let level = match self.kind {
            ExperimentKind::Preimages => self.preimage(n)?,
            _ => self.periodic(n)?,
        };
        let rate = super::rate(level.size);
        let mut out = TaskOutput::default();
        for (i, (phi, &(mean, stderr))) in self.functions.iter().zip(&self.reference).enumerate() {
            let lhs = (mean_of(&level.points, phi) - mean).abs();
            let lip = phi.lipschitz_bound();
            // three standard errors of the sampled integral
            let tol = 3.0 * stderr + 1e-9 * lip;
            let rhs = (level.height.0 + self.constant * rate) * lip;
            out.rows.push(Row {
                key: vec![n as i64, i as i64],
                cells: vec![
                    key_cell(n),
                    key_cell(i),
                    Cell::text(phi.name()),
                    key_cell(level.size),
                    key_cell(level.collisions),
                    Cell::Flag(level.infinity),
                    Cell::num(level.height.0, level.height.1),
                    Cell::num(lhs, tol),
                    Cell::num(rhs, 1e-3 * rhs),
                    Cell::num(rate, f64::EPSILON * rate),
                    Cell::num(lhs / (lip * rate), tol / (lip * rate)),
                ],
            });
            out.summary.push(vec![
                n.to_string(),
                level.size.to_string(),
                phi.name().into(),
                fmt_f64(lhs),
                fmt_f64(lip * rate),
                fmt_f64(lhs / (lip * rate)),
            ]);
        }
        out.plots.push(cloud_plot(&format!("cloud_n{n}"), &level.points));
        Ok(out)
    }

    fn summary_plot(&self) -> PlotData {
        PlotData::new("rates", &["n", "size", "test_function", "lhs", "lip_times_rate", "ratio"])
    }

    fn notes(&self) -> Vec<String> {
        let mut notes = vec![format!(
            "reference integrals from {} equilibrium samples; ∞ is excluded from test-function averages",
            self.sample_size
        )];
        if self.kind == ExperimentKind::Preimages {
            notes.push("preimage clouds carry multiplicity (the pullback measure)".into());
        }
        notes
    }
}
