use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use super::measure::{AtomicMeasureB, LogP};
use super::point::{BerkPoint, ExtRat, PointKind, gromov_product, hyperbolic_distance, is_below, wedge};
use crate::arith::integer::{BigRat, format_rat, rat_int};
use crate::error::{Error, Result};

/// Where type I points are cut off when building a finite tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncation {
    /// Log-radius of the ball replacing a finite classical point.
    pub floor: BigRat,
    /// Log-radius of the ball around 0 replacing ∞.
    pub ceiling: BigRat,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { floor: rat_int(-20), ceiling: rat_int(20) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedLeaf {
    pub original: BerkPoint,
    pub vertex: usize,
}

/// The convex hull of finitely many points of `H_p`, rooted towards ∞.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTree {
    prime: u64,
    vertices: Vec<BerkPoint>,
    parent: Vec<Option<usize>>,
    /// `(child, parent, length)` with length in `log p` units.
    edges: Vec<(usize, usize, BigRat)>,
    base: usize,
    truncated: Vec<TruncatedLeaf>,
}

fn diam(s: &BerkPoint) -> BigRat {
    s.diam().finite().expect("tree vertices are balls").clone()
}

/// Point of a tree: a vertex, or an interior point of the edge above `child`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeLocation {
    Vertex(usize),
    Edge { child: usize, offset: BigRat },
}

impl FiniteTree {
    /// Span of `points ∪ {base}`, closed under pairwise wedges.
    pub fn span(points: &[BerkPoint], base: &BerkPoint, trunc: &Truncation) -> Result<Self> {
        if !base.is_hyperbolic() {
            return Err(Error::InvalidPoint("tree base point must lie in H_p".into()));
        }
        let prime = base.prime();
        if let Some(q) = points.iter().find(|s| s.prime() != prime) {
            return Err(Error::PrimeMismatch(prime, q.prime()));
        }
        let balls: Vec<&BerkPoint> = points.iter().chain([base]).filter(|s| s.is_hyperbolic()).collect();
        let mut floor = trunc.floor.clone();
        let mut ceiling = trunc.ceiling.clone();
        for s in &balls {
            let d = diam(s);
            if d <= floor {
                floor = &d - BigRat::one();
            }
            if let ExtRat::Finite(a) = s.log_abs() {
                if a >= ceiling {
                    ceiling = a + BigRat::one();
                }
            }
        }
        for s in points.iter().filter(|s| !s.is_hyperbolic() && !s.is_infinity()) {
            if let ExtRat::Finite(a) = s.log_abs() {
                if a >= ceiling {
                    ceiling = a + BigRat::one();
                }
            }
        }
        let mut seeds = Vec::with_capacity(points.len() + 1);
        let mut originals = Vec::new();
        for s in points.iter().chain([base]) {
            let t = match s.kind() {
                PointKind::Infinity => BerkPoint::ball_unchecked(prime, BigRat::zero(), ceiling.clone()),
                PointKind::Classical(c) => BerkPoint::ball_unchecked(prime, c.clone(), floor.clone()),
                PointKind::Ball { .. } => s.clone(),
            };
            if !s.is_hyperbolic() {
                originals.push((s.clone(), t.clone()));
            }
            seeds.push(t);
        }
        let mut vertices: Vec<BerkPoint> = Vec::new();
        for s in seeds {
            if !vertices.contains(&s) {
                vertices.push(s);
            }
        }
        loop {
            let mut fresh = Vec::new();
            for i in 0..vertices.len() {
                for j in i + 1..vertices.len() {
                    let w = wedge(&vertices[i], &vertices[j])?;
                    if !vertices.contains(&w) && !fresh.contains(&w) {
                        fresh.push(w);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            vertices.extend(fresh);
        }
        vertices.sort_by(|a, b| {
            diam(a)
                .cmp(&diam(b))
                .then_with(|| a.center().cmp(&b.center()))
        });
        let n = vertices.len();
        let mut parent = vec![None; n];
        let mut edges = Vec::new();
        for i in 0..n {
            // Sorted by diameter, so the first vertex above is the parent.
            for j in i + 1..n {
                if diam(&vertices[j]) > diam(&vertices[i]) && is_below(&vertices[i], &vertices[j])? {
                    parent[i] = Some(j);
                    edges.push((i, j, diam(&vertices[j]) - diam(&vertices[i])));
                    break;
                }
            }
        }
        let base_idx = vertices.iter().position(|v| v == base).unwrap();
        let truncated = originals
            .into_iter()
            .filter(|(o, _)| o != base)
            .map(|(original, t)| TruncatedLeaf {
                vertex: vertices.iter().position(|v| *v == t).unwrap(),
                original,
            })
            .collect();
        Ok(FiniteTree { prime, vertices, parent, edges, base: base_idx, truncated })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn vertices(&self) -> &[BerkPoint] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, BigRat)] {
        &self.edges
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn truncated(&self) -> &[TruncatedLeaf] {
        &self.truncated
    }

    pub fn index_of(&self, s: &BerkPoint) -> Option<usize> {
        self.vertices.iter().position(|v| v == s)
    }

    /// Total length in `log p` units.
    pub fn total_length(&self) -> BigRat {
        self.edges.iter().map(|e| &e.2).sum()
    }

    fn edge_length(&self, child: usize) -> BigRat {
        let p = self.parent[child].expect("edge above root");
        diam(&self.vertices[p]) - diam(&self.vertices[child])
    }

    /// Locates a point lying on the tree; `NotOnTree` otherwise.
    pub fn locate(&self, s: &BerkPoint) -> Result<TreeLocation> {
        if let Some(i) = self.index_of(s) {
            return Ok(TreeLocation::Vertex(i));
        }
        if !s.is_hyperbolic() {
            return Err(Error::NotOnTree);
        }
        let d = diam(s);
        for (i, v) in self.vertices.iter().enumerate() {
            if let Some(p) = self.parent[i] {
                if diam(v) < d && d < diam(&self.vertices[p]) && is_below(v, s)? && is_below(s, &self.vertices[p])? {
                    return Ok(TreeLocation::Edge { child: i, offset: d - diam(v) });
                }
            }
        }
        Err(Error::NotOnTree)
    }

    /// Nearest point of the tree to `s`.
    pub fn retract(&self, s: &BerkPoint) -> Result<BerkPoint> {
        let top = self.vertices.last().unwrap();
        if s.is_infinity() || !is_below(s, top)? {
            return Ok(top.clone());
        }
        let mut best: Option<BerkPoint> = None;
        for v in &self.vertices {
            let m = wedge(s, v)?;
            if best.as_ref().is_none_or(|b| m.diam() < b.diam()) {
                best = Some(m);
            }
        }
        Ok(best.unwrap())
    }

    /// Text dump: a vertex block then an edge block.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "vertices {}", self.vertices.len()).unwrap();
        for v in &self.vertices {
            writeln!(out, "{} {}", format_rat(v.center().unwrap()), format_rat(&diam(v))).unwrap();
        }
        writeln!(out, "edges {}", self.edges.len()).unwrap();
        for (c, p, l) in &self.edges {
            writeln!(out, "{} {} {}", c, p, format_rat(l)).unwrap();
        }
        out
    }
}

/// A continuous function on a finite tree, affine along edges, in `log p` units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeFunction {
    tree: FiniteTree,
    values: Vec<BigRat>,
}

impl TreeFunction {
    pub fn new(tree: FiniteTree, values: Vec<BigRat>) -> Result<Self> {
        if values.len() != tree.vertices.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} values for {} vertices",
                values.len(),
                tree.vertices.len()
            )));
        }
        Ok(TreeFunction { tree, values })
    }

    /// Tabulates `f` at the vertices.
    pub fn from_fn<F: FnMut(&BerkPoint) -> Result<BigRat>>(tree: FiniteTree, mut f: F) -> Result<Self> {
        let values = tree.vertices.iter().map(&mut f).collect::<Result<_>>()?;
        Ok(TreeFunction { tree, values })
    }

    pub fn tree(&self) -> &FiniteTree {
        &self.tree
    }

    pub fn values(&self) -> &[BigRat] {
        &self.values
    }

    fn at_location(&self, loc: &TreeLocation) -> BigRat {
        match loc {
            TreeLocation::Vertex(i) => self.values[*i].clone(),
            TreeLocation::Edge { child, offset } => {
                let p = self.tree.parent[*child].unwrap();
                let slope = (&self.values[p] - &self.values[*child]) / self.tree.edge_length(*child);
                &self.values[*child] + slope * offset
            }
        }
    }

    /// Value at any point, extended as locally constant off the tree.
    pub fn eval(&self, s: &BerkPoint) -> Result<BigRat> {
        let r = self.tree.retract(s)?;
        Ok(self.at_location(&self.tree.locate(&r)?))
    }

    /// Slope along the edge above `child`, going up.
    fn slope(&self, child: usize) -> BigRat {
        let p = self.tree.parent[child].unwrap();
        (&self.values[p] - &self.values[child]) / self.tree.edge_length(child)
    }
}

/// Sum of outgoing slopes at each vertex; `Δ log sup{·,S} = [S] − [top]`.
pub fn laplacian_tree(g: &TreeFunction) -> AtomicMeasureB {
    let t = &g.tree;
    let mut mass = vec![BigRat::zero(); t.vertices.len()];
    for &(c, p, _) in &t.edges {
        let s = g.slope(c);
        mass[c] += &s;
        mass[p] -= &s;
    }
    let atoms = t.vertices.iter().cloned().zip(mass).collect();
    AtomicMeasureB::new(t.prime, atoms).expect("single prime")
}

/// `ĝ_ρ(S) = −ρ(ℙ¹) − ∫ ⟨S, S′⟩_base dρ(S′)` on the span of `supp ρ ∪ {base}`.
pub fn potential_of(rho: &AtomicMeasureB, base: &BerkPoint, trunc: &Truncation) -> Result<TreeFunction> {
    let points: Vec<BerkPoint> = rho.atoms().iter().map(|(s, _)| s.clone()).collect();
    let tree = FiniteTree::span(&points, base, trunc)?;
    let total = rho.total_mass();
    TreeFunction::from_fn(tree, |v| {
        let mut acc = -total.clone();
        for (s, w) in rho.atoms() {
            let g = gromov_product(v, s, base)?;
            let g = g.finite().ok_or(Error::NotOnTree)?;
            acc -= w * g;
        }
        Ok(acc)
    })
}

/// `(ρ, ρ) = ∫ f_ρ² dλ` for a mass-zero measure on `H_p`.
pub fn energy_flux(rho: &AtomicMeasureB, base: &BerkPoint) -> Result<LogP> {
    if !rho.total_mass().is_zero() {
        return Err(Error::InvalidMeasure("flux energy needs total mass 0".into()));
    }
    if rho.atoms().iter().any(|(s, _)| !s.is_hyperbolic()) {
        return Err(Error::InvalidMeasure(
            "type I atoms have infinite energy; regularize with project_eps first".into(),
        ));
    }
    let points: Vec<BerkPoint> = rho.atoms().iter().map(|(s, _)| s.clone()).collect();
    let tree = FiniteTree::span(&points, base, &Truncation::default())?;
    let mut acc = BigRat::zero();
    for (c, _, len) in tree.edges() {
        let v = &tree.vertices()[*c];
        let mut flux = BigRat::zero();
        for (s, w) in rho.atoms() {
            if is_below(s, v)? {
                flux += w;
            }
        }
        acc += &flux * &flux * len;
    }
    Ok(LogP::new(rho.prime(), acc))
}

/// `⟨φ, φ⟩ = Σ slope² · length`.
pub fn tree_dirichlet(phi: &TreeFunction) -> LogP {
    let acc = phi
        .tree
        .edges
        .iter()
        .map(|(c, _, len)| {
            let s = phi.slope(*c);
            &s * &s * len
        })
        .sum();
    LogP::new(phi.tree.prime, acc)
}

/// `∫ φ dρ` for atoms lying on the tree of `φ`.
pub fn tree_pairing(phi: &TreeFunction, rho: &AtomicMeasureB) -> Result<LogP> {
    if rho.prime() != phi.tree.prime {
        return Err(Error::PrimeMismatch(phi.tree.prime, rho.prime()));
    }
    let mut acc = BigRat::zero();
    for (s, w) in rho.atoms() {
        let loc = phi.tree.locate(s)?;
        acc += w * phi.at_location(&loc);
    }
    Ok(LogP::new(rho.prime(), acc))
}

/// Both sides of `|∫φ dρ|² ≤ ⟨φ,φ⟩ (ρ,ρ)`, as coefficients of `(log p)²`.
pub fn cauchy_schwarz_check(phi: &TreeFunction, rho: &AtomicMeasureB) -> Result<(BigRat, BigRat)> {
    let pairing = tree_pairing(phi, rho)?;
    let energy = super::measure::energy_atomic_b(rho, rho)?;
    let lhs = &pairing.coeff * &pairing.coeff;
    let rhs = tree_dirichlet(phi).coeff * energy.coeff;
    debug_assert!(!rhs.is_negative() || rho.total_mass() != BigRat::zero());
    Ok((lhs, rhs))
}

/// `d(S,S′)` helper in the same units as energies.
pub fn distance_logp(s: &BerkPoint, t: &BerkPoint) -> Result<LogP> {
    Ok(LogP::new(s.prime(), hyperbolic_distance(s, t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::rat;
    use crate::berkovich::measure::energy_atomic_b;
    use crate::berkovich::point::log_sup;

    fn ball(p: u64, c: BigRat, r: BigRat) -> BerkPoint {
        BerkPoint::ball(p, c, r).unwrap()
    }

    #[test]
    fn span_examples() {
        let p = 3;
        let g = BerkPoint::gauss(p).unwrap();
        let t = FiniteTree::span(&[ball(p, rat_int(0), rat_int(-2))], &g, &Truncation::default()).unwrap();
        assert_eq!(t.vertices().len(), 2);
        assert_eq!(t.edges().len(), 1);
        assert_eq!(t.edges()[0].2, rat_int(2));

        let pts = [ball(p, rat_int(0), rat_int(-1)), ball(p, rat_int(1), rat_int(-1))];
        let t = FiniteTree::span(&pts, &g, &Truncation::default()).unwrap();
        assert_eq!(t.vertices().len(), 3);
        assert!(t.edges().iter().all(|e| e.1 == t.base() && e.2 == rat_int(1)));

        let t = FiniteTree::span(&[g.clone()], &g, &Truncation::default()).unwrap();
        assert_eq!(t.vertices().len(), 1);
        assert!(t.edges().is_empty());
    }

    #[test]
    fn truncation_is_reported() {
        let p = 2;
        let g = BerkPoint::gauss(p).unwrap();
        let pts = [BerkPoint::classical(p, rat_int(4)).unwrap(), BerkPoint::infinity(p).unwrap()];
        let t = FiniteTree::span(&pts, &g, &Truncation::default()).unwrap();
        assert_eq!(t.truncated().len(), 2);
        let leaf = &t.vertices()[t.truncated()[0].vertex];
        assert_eq!(leaf.diam(), ExtRat::Finite(rat_int(-20)));
    }

    #[test]
    fn laplacian_of_log_sup() {
        let p = 5;
        let g = BerkPoint::gauss(p).unwrap();
        let s = ball(p, rat(1, 5), rat_int(-3));
        let pts = [s.clone(), BerkPoint::infinity(p).unwrap(), ball(p, rat_int(2), rat_int(-1))];
        let tree = FiniteTree::span(&pts, &g, &Truncation::default()).unwrap();
        let top = tree.vertices().last().unwrap().clone();
        let f = TreeFunction::from_fn(tree, |v| Ok(log_sup(v, &g).unwrap().finite().unwrap().clone())).unwrap();
        let lap = laplacian_tree(&f);
        let expected = AtomicMeasureB::dirac(g.clone()).sub(&AtomicMeasureB::dirac(top)).unwrap();
        assert_eq!(lap, expected);
        let _ = s;
    }

    #[test]
    fn laplacian_of_gromov_and_constants() {
        let p = 3;
        let s0 = ball(p, rat_int(1), rat_int(-1));
        let s = ball(p, rat(2, 9), rat(1, 2));
        let other = ball(p, rat_int(7), rat_int(-4));
        let tree = FiniteTree::span(&[s.clone(), other], &s0, &Truncation::default()).unwrap();
        let f = TreeFunction::from_fn(tree.clone(), |v| {
            Ok(gromov_product(v, &s, &s0).unwrap().finite().unwrap().clone())
        })
        .unwrap();
        let expected = AtomicMeasureB::dirac(s0.clone()).sub(&AtomicMeasureB::dirac(s)).unwrap();
        assert_eq!(laplacian_tree(&f), expected);
        let c = TreeFunction::from_fn(tree, |_| Ok(rat_int(7))).unwrap();
        assert!(laplacian_tree(&c).is_zero());
        assert_eq!(tree_dirichlet(&c).coeff, rat_int(0));
    }

    #[test]
    fn potential_examples() {
        let p = 7;
        let base = BerkPoint::gauss(p).unwrap();
        let tr = Truncation::default();
        let g = potential_of(&AtomicMeasureB::dirac(base.clone()), &base, &tr).unwrap();
        assert!(g.values().iter().all(|v| *v == rat_int(-1)));

        let s = ball(p, rat(3, 7), rat_int(-2));
        let g = potential_of(&AtomicMeasureB::dirac(s.clone()), &base, &tr).unwrap();
        let probe = ball(p, rat(3, 7), rat_int(-5));
        let expected = rat_int(-1) - gromov_product(&probe, &s, &base).unwrap().finite().unwrap();
        assert_eq!(g.eval(&probe).unwrap(), expected);
        let mid = ball(p, rat(3, 7), rat(-1, 3));
        let expected = rat_int(-1) - gromov_product(&mid, &s, &base).unwrap().finite().unwrap();
        assert_eq!(g.eval(&mid).unwrap(), expected);
    }

    #[test]
    fn potential_laplacian_identity() {
        let p = 2;
        let base = ball(p, rat_int(0), rat_int(1));
        let rho = AtomicMeasureB::new(
            p,
            vec![
                (ball(p, rat_int(1), rat_int(-2)), rat(1, 3)),
                (ball(p, rat(1, 2), rat_int(0)), rat(2, 3)),
                (ball(p, rat_int(6), rat(-3, 2)), rat(-1, 2)),
            ],
        )
        .unwrap();
        let g = potential_of(&rho, &base, &Truncation::default()).unwrap();
        let expected = rho.sub(&AtomicMeasureB::dirac(base).scale(&rho.total_mass())).unwrap();
        assert_eq!(laplacian_tree(&g), expected);
    }

    #[test]
    fn flux_matches_distance() {
        let p = 3;
        let s = ball(p, rat_int(0), rat_int(-2));
        let t = ball(p, rat_int(1), rat(1, 2));
        let rho = AtomicMeasureB::dirac(s.clone()).sub(&AtomicMeasureB::dirac(t.clone())).unwrap();
        let base = BerkPoint::gauss(p).unwrap();
        let d = hyperbolic_distance(&s, &t).unwrap();
        assert_eq!(energy_flux(&rho, &base).unwrap().coeff, d);
        assert_eq!(energy_atomic_b(&rho, &rho).unwrap().coeff, d);
        assert_eq!(energy_flux(&AtomicMeasureB::zero(p), &base).unwrap().coeff, rat_int(0));
        let bad = AtomicMeasureB::dirac(BerkPoint::classical(p, rat_int(0)).unwrap())
            .sub(&AtomicMeasureB::dirac(t))
            .unwrap();
        assert!(matches!(energy_flux(&bad, &base), Err(Error::InvalidMeasure(_))));
    }

    #[test]
    fn dirichlet_of_potential() {
        let p = 5;
        let s = ball(p, rat_int(0), rat_int(-2));
        let t = ball(p, rat_int(5), rat_int(-1));
        let base = BerkPoint::gauss(p).unwrap();
        let rho = AtomicMeasureB::dirac(s.clone()).sub(&AtomicMeasureB::dirac(t.clone())).unwrap();
        let g = potential_of(&rho, &base, &Truncation::default()).unwrap();
        assert_eq!(tree_dirichlet(&g).coeff, hyperbolic_distance(&s, &t).unwrap());
        let (lhs, rhs) = cauchy_schwarz_check(&g, &rho).unwrap();
        assert!(lhs <= rhs);
        // Single-edge affine function of slope 1.
        let tree = FiniteTree::span(&[ball(p, rat_int(0), rat_int(-3))], &base, &Truncation::default()).unwrap();
        let f = TreeFunction::from_fn(tree, |v| Ok(v.diam().finite().unwrap().clone())).unwrap();
        assert_eq!(tree_dirichlet(&f).coeff, rat_int(3));
    }

    #[test]
    fn off_tree_atoms_rejected() {
        let p = 3;
        let base = BerkPoint::gauss(p).unwrap();
        let tree = FiniteTree::span(&[ball(p, rat_int(0), rat_int(-2))], &base, &Truncation::default()).unwrap();
        let f = TreeFunction::from_fn(tree, |_| Ok(rat_int(1))).unwrap();
        let rho = AtomicMeasureB::dirac(ball(p, rat_int(1), rat_int(-1)));
        assert_eq!(tree_pairing(&f, &rho), Err(Error::NotOnTree));
        let on_edge = AtomicMeasureB::dirac(ball(p, rat_int(9), rat_int(-1)));
        assert_eq!(tree_pairing(&f, &on_edge).unwrap().coeff, rat_int(1));
    }

    #[test]
    fn dump_format() {
        let p = 2;
        let base = BerkPoint::gauss(p).unwrap();
        let tree = FiniteTree::span(&[ball(p, rat_int(1), rat_int(-1))], &base, &Truncation::default()).unwrap();
        assert_eq!(tree.dump(), "vertices 2\n1 -1\n0 0\nedges 1\n0 1 1\n");
    }
}
