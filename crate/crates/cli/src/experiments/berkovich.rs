use adelic_core::arith::{BigRat, format_rat, rat, rat_int};
use adelic_core::berkovich::{
    AtomicMeasureB, BerkPoint, FiniteTree, LogP, Truncation, energy_atomic_b, energy_flux, hyperbolic_distance,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Experiment, TaskOutput, key_cell};
use crate::config::ExperimentConfig;
use crate::report::{Cell, Column, ColumnKind, PlotData, Row};

/// Random balls over `ℚ_p`: the tree they span and the energies of their differences.
pub struct BerkovichDemo {
    primes: Vec<u64>,
    count: usize,
    seed: u64,
}

impl BerkovichDemo {
    pub fn new(c: &ExperimentConfig) -> Self {
        let p = &c.parameters;
        let mut primes = p.primes.clone().unwrap_or_default();
        primes.sort_unstable();
        primes.dedup();
        BerkovichDemo { primes, count: p.count.unwrap_or(3), seed: p.seed.unwrap_or(0) }
    }
}

/// Distinct balls with small rational centers and log-radii in `[−4, 4]`.
pub fn random_balls(p: u64, count: usize, seed: u64) -> adelic_core::Result<Vec<BerkPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut balls: Vec<BerkPoint> = Vec::with_capacity(count);
    while balls.len() < count {
        let den = [1, 2, 3][rng.gen_range(0..3)];
        let center = rat(rng.gen_range(-40..=40), (p as i64).pow(rng.gen_range(0..3)));
        let logr = rat(rng.gen_range(-4 * den..=4 * den), den);
        let b = BerkPoint::ball(p, center, logr)?;
        if !balls.contains(&b) {
            balls.push(b);
        }
    }
    Ok(balls)
}

fn tree_plot(p: u64, tree: &FiniteTree) -> PlotData {
    let mut plot = PlotData::new(&format!("tree_p{p}"), &["vertex", "center", "log_radius", "parent", "edge_length"]);
    for (k, v) in tree.vertices().iter().enumerate() {
        let (parent, len) = match tree.edges().iter().find(|(c, _, _)| *c == k) {
            Some((_, q, l)) => (q.to_string(), format_rat(l)),
            None => (String::new(), String::new()),
        };
        let center = v.center().map(format_rat).unwrap_or_default();
        let radius = v.diam().finite().map(format_rat).unwrap_or_default();
        plot.push(vec![k.to_string(), center, radius, parent, len]);
    }
    plot
}

impl Experiment for BerkovichDemo {
    type Task = u64;

    fn columns(&self) -> Vec<Column> {
        vec![
            Column::new("prime", ColumnKind::Key),
            Column::new("i", ColumnKind::Key),
            Column::new("j", ColumnKind::Key),
            Column::new("measure", ColumnKind::Text),
            Column::new("energy_flux", ColumnKind::ExactLog),
            Column::new("energy_atomic", ColumnKind::ExactLog),
            Column::new("distance", ColumnKind::ExactLog),
            Column::new("flux_equals_atomic", ColumnKind::Flag),
            Column::new("energy_equals_distance", ColumnKind::Flag),
        ]
    }

    fn tasks(&self) -> Vec<u64> {
        self.primes.clone()
    }

    fn key(&self, &p: &u64) -> Vec<i64> {
        vec![p as i64]
    }

    fn run(&self, &p: &u64) -> adelic_core::Result<TaskOutput> {
        let balls = random_balls(p, self.count, self.seed)?;
        let gauss = BerkPoint::gauss(p)?;
        let tree = FiniteTree::span(&balls, &gauss, &Truncation::default())?;
        let mut out = TaskOutput::default();
        let mut summary = PlotData::new("", &["prime", "index", "center", "log_radius"]);
        for (i, b) in balls.iter().enumerate() {
            summary.push(vec![
                p.to_string(),
                i.to_string(),
                b.center().map(format_rat).unwrap_or_default(),
                b.diam().finite().map(format_rat).unwrap_or_default(),
            ]);
        }
        out.summary = summary.records;
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                let rho = AtomicMeasureB::dirac(balls[i].clone()).sub(&AtomicMeasureB::dirac(balls[j].clone()))?;
                let flux = energy_flux(&rho, &gauss)?;
                let atomic = energy_atomic_b(&rho, &rho)?;
                let d = LogP::new(p, hyperbolic_distance(&balls[i], &balls[j])?);
                out.rows.push(Row {
                    key: vec![p as i64, i as i64, j as i64],
                    cells: vec![
                        Cell::Key(p as i64),
                        key_cell(i),
                        key_cell(j),
                        Cell::text(format!("[S{i}]-[S{j}]")),
                        Cell::ExactLog(flux.clone()),
                        Cell::ExactLog(atomic.clone()),
                        Cell::ExactLog(d.clone()),
                        Cell::Flag(flux == atomic),
                        Cell::Flag(atomic == d),
                    ],
                });
            }
        }
        // integer weights summing to zero
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(p));
        let mut weights: Vec<i64> = (0..balls.len() - 1).map(|_| rng.gen_range(-3..=3)).collect();
        weights.push(-weights.iter().sum::<i64>());
        let atoms: Vec<(BerkPoint, BigRat)> = balls.iter().cloned().zip(weights.iter().map(|&w| rat_int(w))).collect();
        let rho = AtomicMeasureB::new(p, atoms)?;
        let (flux, atomic) = if rho.is_zero() {
            (LogP::new(p, rat_int(0)), LogP::new(p, rat_int(0)))
        } else {
            (energy_flux(&rho, &gauss)?, energy_atomic_b(&rho, &rho)?)
        };
        let label = weights.iter().enumerate().map(|(k, w)| format!("{w:+}[S{k}]")).collect::<String>();
        out.rows.push(Row {
            key: vec![p as i64, balls.len() as i64, 0],
            cells: vec![
                Cell::Key(p as i64),
                Cell::Empty,
                Cell::Empty,
                Cell::text(label),
                Cell::ExactLog(flux.clone()),
                Cell::ExactLog(atomic.clone()),
                Cell::Empty,
                Cell::Flag(flux == atomic),
                Cell::Empty,
            ],
        });
        out.plots.push(tree_plot(p, &tree));
        Ok(out)
    }

    fn summary_plot(&self) -> PlotData {
        PlotData::new("balls", &["prime", "index", "center", "log_radius"])
    }

    fn notes(&self) -> Vec<String> {
        vec!["energies and distances are coefficients of log p; trees are rooted at the Gauss point".into()]
    }
}
