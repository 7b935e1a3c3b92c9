//! Spanning forests on unoriented Cayley balls: minimal-spanning-forest
//! sampling, the deterministic counting inequalities behind the degree
//! bounds, the θ substitution map, and degree-driven translation schemes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num_rational::Ratio;
use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{cayley_ball, Group};
use crate::matching::{find_even_k_subgraph, CayleyBall, MatchOutcome};
use crate::word::{Alphabet, Word};

/// Unoriented edge `{tail, tail·s_label}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BallEdge {
    pub tail: usize,
    pub head: usize,
    pub label: usize,
}

#[derive(Clone, Debug)]
pub struct BallGraph {
    pub elements: Vec<Word>,
    pub dist: Vec<usize>,
    pub radius: usize,
    pub gens: Vec<Word>,
    pub edges: Vec<BallEdge>,
    alphabet: Alphabet,
    /// `nbr[v][2i]` is `v·s_i`, `nbr[v][2i+1]` is `v·s_i⁻¹`.
    nbr: Vec<Vec<Option<usize>>>,
    /// Edge id along the same directions as `nbr`.
    edge_at: Vec<Vec<Option<usize>>>,
    interior: Vec<bool>,
    index: HashMap<Word, usize>,
}

impl BallGraph {
    pub fn build(group: &dyn Group, gens: &[Word], r: usize) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidArgument("empty generating set".into()));
        }
        let gens: Vec<Word> = gens.iter().map(|g| group.normal_form(g)).collect();
        let mut seen = BTreeSet::new();
        for g in &gens {
            let sq = group.mul(g, g);
            if g.is_identity() || sq.is_identity() {
                return Err(Error::Unsupported(format!("label {} is trivial or an involution", group.alphabet().format(g))));
            }
            if !seen.insert(g.clone()) || !seen.insert(group.inv(g)) {
                return Err(Error::InvalidArgument("labels must be distinct up to inversion".into()));
            }
        }
        let ball = cayley_ball(group, &gens, r);
        let elements: Vec<Word> = ball.iter().map(|b| b.element.clone()).collect();
        let dist: Vec<usize> = ball.iter().map(|b| b.dist).collect();
        let index: HashMap<Word, usize> = elements.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let n = elements.len();
        let mut nbr = vec![vec![None; 2 * gens.len()]; n];
        let mut edge_at = vec![vec![None; 2 * gens.len()]; n];
        let mut edges = Vec::new();
        for v in 0..n {
            for (i, s) in gens.iter().enumerate() {
                if let Some(&w) = index.get(&group.mul(&elements[v], s)) {
                    nbr[v][2 * i] = Some(w);
                    nbr[w][2 * i + 1] = Some(v);
                    edge_at[v][2 * i] = Some(edges.len());
                    edge_at[w][2 * i + 1] = Some(edges.len());
                    edges.push(BallEdge { tail: v, head: w, label: i });
                }
            }
        }
        let interior = nbr.iter().map(|row| row.iter().all(Option::is_some)).collect();
        Ok(BallGraph {
            elements,
            dist,
            radius: r,
            gens,
            edges,
            alphabet: group.alphabet().clone(),
            nbr,
            edge_at,
            interior,
            index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.elements.len()
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.interior[v]).collect()
    }

    pub fn vertex_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Neighbor along `s_i` (`inv = false`) or `s_i⁻¹`.
    pub fn step(&self, v: usize, label: usize, inv: bool) -> Option<usize> {
        self.nbr[v][2 * label + inv as usize]
    }

    fn edge_step(&self, v: usize, label: usize, inv: bool) -> Option<usize> {
        self.edge_at[v][2 * label + inv as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.nbr[v].iter().flatten().count()
    }

    pub fn to_dot(&self, forest: Option<&SpanningForest>) -> String {
        let on: BTreeSet<usize> = forest.map(|f| f.edges.iter().copied().collect()).unwrap_or_default();
        let mut out = String::from("graph ball {\n");
        for (v, w) in self.elements.iter().enumerate() {
            let shape = if self.interior[v] { "circle" } else { "point" };
            let _ = writeln!(out, "  {v} [label=\"{}\", shape={shape}];", self.alphabet.format(w));
        }
        for (i, e) in self.edges.iter().enumerate() {
            let style = if on.contains(&i) { "bold" } else { "dotted" };
            let _ = writeln!(
                out,
                "  {} -- {} [label=\"{}\", style={style}];",
                e.tail,
                e.head,
                self.alphabet.format(&self.gens[e.label])
            );
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct SpanningForest {
    pub edges: Vec<usize>,
}

impl SpanningForest {
    pub fn contains(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn degree(&self, g: &BallGraph, v: usize) -> usize {
        self.edges.iter().filter(|&&e| g.edges[e].tail == v || g.edges[e].head == v).count()
    }

    pub fn is_acyclic(&self, g: &BallGraph) -> bool {
        is_forest(g.vertex_count(), self.edges.iter().map(|&e| (g.edges[e].tail, g.edges[e].head)))
    }

    /// Every edge of `g` joins two vertices already connected by the forest.
    pub fn is_spanning(&self, g: &BallGraph) -> bool {
        let mut uf = UnionFind::new(g.vertex_count());
        for &e in &self.edges {
            uf.union(g.edges[e].tail, g.edges[e].head);
        }
        g.edges.iter().all(|e| uf.equiv(e.tail, e.head))
    }
}

/// Union-find cycle check; loops and parallel edges count as cycles.
pub fn is_forest(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> bool {
    let mut uf = UnionFind::new(n);
    edges.into_iter().all(|(u, v)| uf.union(u, v))
}

fn weights(g: &BallGraph, seed: u64, trial: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    (0..g.edges.len()).map(|_| rng.random()).collect()
}

/// Kruskal on seeded uniform weights; edges labeled `forced` are taken first.
pub fn minimal_spanning_forest(g: &BallGraph, seed: u64, trial: u64, forced: Option<usize>) -> SpanningForest {
    let w = weights(g, seed, trial);
    let mut order: Vec<usize> = (0..g.edges.len()).collect();
    order.sort_by_key(|&e| (Some(g.edges[e].label) != forced, w[e], e));
    let mut uf = UnionFind::new(g.vertex_count());
    let mut edges: Vec<usize> = order.into_iter().filter(|&e| uf.union(g.edges[e].tail, g.edges[e].head)).collect();
    edges.sort_unstable();
    SpanningForest { edges }
}

pub fn sample_forests(g: &BallGraph, trials: u64, seed: u64, forced: Option<usize>) -> Vec<SpanningForest> {
    (0..trials).into_par_iter().map(|t| minimal_spanning_forest(g, seed, t, forced)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestStats {
    pub samples: u64,
    pub center_degrees: BTreeMap<usize, u64>,
    pub mean_degree: Ratio<u64>,
    pub seed: u64,
    /// Every sample was acyclic and spanning.
    pub all_valid: bool,
}

impl ForestStats {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "samples": self.samples,
            "center_degrees": self.center_degrees.iter().map(|(d, c)| (d.to_string(), *c)).collect::<BTreeMap<_, _>>(),
            "mean_degree": self.mean_degree.to_string(),
            "mean_degree_float": *self.mean_degree.numer() as f64 / *self.mean_degree.denom() as f64,
            "seed": self.seed,
            "all_valid": self.all_valid,
        })
    }
}

/// Degree of the identity in sampled minimal spanning forests.
pub fn sample_msf(g: &BallGraph, trials: u64, seed: u64, forced: Option<usize>) -> Result<ForestStats> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let center = g.vertex_of(&Word::identity()).expect("ball contains the identity");
    let per: Vec<(usize, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = minimal_spanning_forest(g, seed, t, forced);
            (f.degree(g, center), f.is_acyclic(g) && f.is_spanning(g))
        })
        .collect();
    let mut center_degrees = BTreeMap::new();
    for &(d, _) in &per {
        *center_degrees.entry(d).or_insert(0) += 1;
    }
    let total: u64 = per.iter().map(|&(d, _)| d as u64).sum();
    Ok(ForestStats {
        samples: trials,
        center_degrees,
        mean_degree: Ratio::new(total, trials),
        seed,
        all_valid: per.iter().all(|&(_, ok)| ok),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub lhs: i64,
    pub rhs: i64,
    pub margin: i64,
    pub holds: bool,
}

impl Inequality {
    /// `lhs > rhs`, or both sides come from empty sets.
    fn strict(lhs: usize, rhs: i64, empty: bool) -> Self {
        let lhs = lhs as i64;
        Inequality { lhs, rhs, margin: lhs - rhs, holds: lhs > rhs || empty }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountingReport {
    pub d_a: usize,
    /// `|A·T⁻¹| > d_A − |S||A|`.
    pub a: Inequality,
    /// `|A·(T∪T⁻¹)| > d_A − |A|`.
    pub b: Inequality,
    /// `|A·T₁⁻¹ ∪ B·T₂⁻¹| > d_A − (|S|+1)|A| + |B|`.
    pub e: Option<Inequality>,
    /// `|A·(T₁∪T₁⁻¹) ∪ B·T₂⁻¹| > d_A − 3|A| + |B|`.
    pub f: Option<Inequality>,
}

impl CountingReport {
    pub fn violations(&self) -> usize {
        [Some(&self.a), Some(&self.b), self.e.as_ref(), self.f.as_ref()].into_iter().flatten().filter(|i| !i.holds).count()
    }
}

/// Deterministic counting inequalities for a forest `forest`, an interior
/// set `a_set`, and (with a label `a` whose edges at `b_set` lie in the
/// forest) the mixed inequalities with `T₁ = T∖{a}`, `T₂ = {1,a}`.
pub fn forest_counting_checks(
    g: &BallGraph,
    forest: &SpanningForest,
    a_set: &[usize],
    b_set: &[usize],
    a: Option<usize>,
) -> Result<CountingReport> {
    let s = g.gens.len();
    for &v in a_set.iter().chain(b_set) {
        if v >= g.vertex_count() || !g.is_interior(v) {
            return Err(Error::InvalidArgument(format!("vertex {v} is not interior")));
        }
    }
    let a_set: BTreeSet<usize> = a_set.iter().copied().collect();
    let b_set: BTreeSet<usize> = b_set.iter().copied().collect();
    let d_a: usize = a_set.iter().map(|&v| forest.degree(g, v)).sum();
    let na = a_set.len() as i64;
    let nb = b_set.len() as i64;
    let da = d_a as i64;
    let grow = |set: &BTreeSet<usize>, dirs: &dyn Fn(usize, bool) -> bool| -> BTreeSet<usize> {
        let mut out = set.clone();
        for &v in set {
            for i in 0..s {
                for inv in [false, true] {
                    if dirs(i, inv) {
                        out.insert(g.step(v, i, inv).expect("interior"));
                    }
                }
            }
        }
        out
    };
    let empty = a_set.is_empty();
    let at = grow(&a_set, &|_, inv| inv);
    let att = grow(&a_set, &|_, _| true);
    let ineq_a = Inequality::strict(at.len(), da - s as i64 * na, empty);
    let ineq_b = Inequality::strict(att.len(), da - na, empty);
    let (e, f) = match a {
        None => (None, None),
        Some(al) => {
            if al >= s {
                return Err(Error::InvalidArgument(format!("label {al} out of range")));
            }
            for &v in &b_set {
                for inv in [false, true] {
                    let edge = g.edge_step(v, al, inv).expect("interior");
                    if !forest.contains(edge) {
                        return Err(Error::InvalidArgument(format!(
                            "forest misses the {}-edge at vertex {v}",
                            g.alphabet.format(&g.gens[al])
                        )));
                    }
                }
            }
            let bt2 = grow(&b_set, &|i, inv| i == al && inv);
            let at1 = grow(&a_set, &|i, inv| i != al && inv);
            let att1 = grow(&a_set, &|i, _| i != al);
            let empty = a_set.is_empty() && b_set.is_empty();
            let e = Inequality::strict(at1.union(&bt2).count(), da - (s as i64 + 1) * na + nb, empty);
            let f = Inequality::strict(att1.union(&bt2).count(), da - 3 * na + nb, empty);
            (Some(e), Some(f))
        }
    };
    Ok(CountingReport { d_a, a: ineq_a, b: ineq_b, e, f })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaEdge {
    pub tail: usize,
    pub head: usize,
    /// Index `i` of `s'_i`.
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaOutput {
    /// `s'_0, …, s'_n` as words.
    pub labels: Vec<Word>,
    pub edges: Vec<ThetaEdge>,
    pub acyclic: bool,
}

/// `s'_i = a^i b a^{−i}` for `i < n`, `s'_n = a^n`.
pub fn theta_labels(a: &Word, b: &Word, n: usize) -> Vec<Word> {
    let mut out: Vec<Word> = (0..n as i64).map(|i| b.conj(&a.pow(i).inv())).collect();
    out.push(a.pow(n as i64));
    out
}

/// Keeps `{g, g·s'_i}` exactly when the natural path from `g` lies in
/// `forest`; the result is checked for cycles.
pub fn theta_transform(g: &BallGraph, forest: &SpanningForest, a: usize, b: usize, n: usize) -> Result<ThetaOutput> {
    if a == b || a >= g.gens.len() || b >= g.gens.len() {
        return Err(Error::InvalidArgument("a and b must be distinct labels".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if g.radius < 2 * n - 1 {
        return Err(Error::RadiusTooSmall { radius: g.radius, needed: 2 * n - 1 });
    }
    let labels = theta_labels(&g.gens[a], &g.gens[b], n);
    let path = |i: usize| -> Vec<(usize, bool)> {
        if i == n {
            vec![(a, false); n]
        } else {
            let mut p = vec![(a, false); i];
            p.push((b, false));
            p.extend(std::iter::repeat_n((a, true), i));
            p
        }
    };
    let paths: Vec<Vec<(usize, bool)>> = (0..=n).map(path).collect();
    let mut edges = Vec::new();
    for v in 0..g.vertex_count() {
        for (i, p) in paths.iter().enumerate() {
            let mut cur = v;
            let ok = p.iter().all(|&(l, inv)| match g.edge_step(cur, l, inv) {
                Some(e) if forest.contains(e) => {
                    cur = g.step(cur, l, inv).expect("edge has endpoints");
                    true
                }
                _ => false,
            });
            if ok {
                edges.push(ThetaEdge { tail: v, head: cur, label: i });
            }
        }
    }
    let acyclic = is_forest(g.vertex_count(), edges.iter().map(|e| (e.tail, e.head)));
    Ok(ThetaOutput { labels, edges, acyclic })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HarnessReport {
    pub trials: u64,
    /// Violations of (a), (b), (e), (f) in that order.
    pub violations: [u64; 4],
    /// Smallest margin seen per inequality.
    pub min_margins: [i64; 4],
}

/// Random `(forest, A, B)` triples: forests keep every `a`-edge, `A` and `B`
/// are random interior subsets.
pub fn counting_harness(g: &BallGraph, trials: u64, seed: u64, a: usize) -> Result<HarnessReport> {
    let interior = g.interior();
    if interior.is_empty() {
        return Err(Error::RadiusTooSmall { radius: g.radius, needed: 1 });
    }
    let forests = sample_forests(g, trials, seed, Some(a));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut out = HarnessReport { trials, violations: [0; 4], min_margins: [i64::MAX; 4] };
    for f in &forests {
        let size_a = rng.random_range(1..=interior.len());
        let size_b = rng.random_range(0..=interior.len());
        let a_set: Vec<usize> = interior.iter().copied().filter(|_| rng.random_range(0..interior.len()) < size_a).collect();
        let b_set: Vec<usize> = interior.iter().copied().filter(|_| rng.random_range(0..interior.len()) < size_b).collect();
        let rep = forest_counting_checks(g, f, &a_set, &b_set, Some(a))?;
        let all = [Some(&rep.a), Some(&rep.b), rep.e.as_ref(), rep.f.as_ref()];
        for (i, ineq) in all.into_iter().enumerate() {
            let ineq = ineq.expect("label given");
            out.min_margins[i] = out.min_margins[i].min(ineq.margin);
            if !ineq.holds {
                out.violations[i] += 1;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ThetaHarness {
    pub trials: u64,
    pub acyclic: u64,
    pub edges: u64,
}

/// θ on sampled forests thinned by dropping each edge with probability ¼,
/// so that trees also yield varied inputs.
pub fn theta_harness(g: &BallGraph, trials: u64, seed: u64, a: usize, b: usize, n: usize) -> Result<ThetaHarness> {
    let mut out = ThetaHarness { trials, ..Default::default() };
    for (t, f) in sample_forests(g, trials, seed, None).into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7e7a);
        rng.set_stream(t as u64);
        let thinned = SpanningForest { edges: f.edges.into_iter().filter(|_| rng.random_range(0..4) != 0).collect() };
        let th = theta_transform(g, &thinned, a, b, n)?;
        out.acyclic += th.acyclic as u64;
        out.edges += th.edges.len() as u64;
    }
    Ok(out)
}

/// A rule turning a generating set into translating sets.
pub trait TranslationScheme: Send + Sync {
    fn name(&self) -> &'static str;
    /// The translating sets for `S`, with `a` an index into `S` where needed.
    fn sets(&self, group: &dyn Group, s: &[Word], a: Option<usize>) -> Result<Vec<Vec<Word>>>;
}

fn base_t(group: &dyn Group, s: &[Word]) -> Vec<Word> {
    let mut t = vec![Word::identity()];
    t.extend(s.iter().map(|w| group.normal_form(w)));
    t
}

fn symmetric(group: &dyn Group, t: &[Word]) -> Vec<Word> {
    let mut out = t.to_vec();
    for w in t {
        let i = group.inv(w);
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

fn without(t: &[Word], x: &Word) -> Vec<Word> {
    t.iter().filter(|w| *w != x).cloned().collect()
}

fn two_gens(s: &[Word]) -> Result<(&Word, &Word)> {
    match s {
        [s1, s2, ..] => Ok((s1, s2)),
        _ => Err(Error::InvalidArgument("need at least two generators".into())),
    }
}

fn pick_a(s: &[Word], a: Option<usize>) -> Result<&Word> {
    s.get(a.unwrap_or(0)).ok_or_else(|| Error::InvalidArgument("label a out of range".into()))
}

/// `T∖{s₁}`, `T∖{s₂}`.
struct DropOne;
/// `T∪T⁻¹∖{s₁}`, `T∪T⁻¹∖{s₂}`.
struct DropOneSymmetric;
/// `T∖{a}`, `{1,a}`.
struct SplitA;
/// `T₁∪T₁⁻¹`, `{1,a}`.
struct SplitASymmetric;

impl TranslationScheme for DropOne {
    fn name(&self) -> &'static str {
        "c"
    }
    fn sets(&self, group: &dyn Group, s: &[Word], _: Option<usize>) -> Result<Vec<Vec<Word>>> {
        let (s1, s2) = two_gens(s)?;
        let t = base_t(group, s);
        Ok(vec![without(&t, s1), without(&t, s2)])
    }
}

impl TranslationScheme for DropOneSymmetric {
    fn name(&self) -> &'static str {
        "d"
    }
    fn sets(&self, group: &dyn Group, s: &[Word], _: Option<usize>) -> Result<Vec<Vec<Word>>> {
        let (s1, s2) = two_gens(s)?;
        let t = symmetric(group, &base_t(group, s));
        Ok(vec![without(&t, s1), without(&t, s2)])
    }
}

impl TranslationScheme for SplitA {
    fn name(&self) -> &'static str {
        "g"
    }
    fn sets(&self, group: &dyn Group, s: &[Word], a: Option<usize>) -> Result<Vec<Vec<Word>>> {
        let a = pick_a(s, a)?;
        Ok(vec![without(&base_t(group, s), a), vec![Word::identity(), a.clone()]])
    }
}

impl TranslationScheme for SplitASymmetric {
    fn name(&self) -> &'static str {
        "h"
    }
    fn sets(&self, group: &dyn Group, s: &[Word], a: Option<usize>) -> Result<Vec<Vec<Word>>> {
        let a = pick_a(s, a)?;
        let t1 = without(&base_t(group, s), a);
        Ok(vec![symmetric(group, &t1), vec![Word::identity(), a.clone()]])
    }
}

pub struct SchemeRegistry {
    schemes: Vec<Box<dyn TranslationScheme>>,
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        SchemeRegistry {
            schemes: vec![Box::new(DropOne), Box::new(DropOneSymmetric), Box::new(SplitA), Box::new(SplitASymmetric)],
        }
    }
}

impl SchemeRegistry {
    pub fn register(&mut self, scheme: Box<dyn TranslationScheme>) {
        self.schemes.push(scheme);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.schemes.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn TranslationScheme> {
        self.schemes
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::Unknown { kind: "variant", name: name.into() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeOutcome {
    pub sets: Vec<Vec<Word>>,
    pub total_size: usize,
    pub vertices: usize,
    pub demand: usize,
    pub outcome: MatchOutcome,
}

/// Matching on the ball of radius `r` of the 2-colored Cayley graph of the
/// scheme's translating sets, with interior demand.
pub fn decomposition_from_degree(
    group: &dyn Group,
    s: &[Word],
    r: usize,
    scheme: &dyn TranslationScheme,
    a: Option<usize>,
) -> Result<DegreeOutcome> {
    let sets = scheme.sets(group, s, a)?;
    let ball = CayleyBall::build(group, &sets, s, r)?;
    let demand = ball.graph.interior();
    let outcome = find_even_k_subgraph(&ball.graph, &demand);
    Ok(DegreeOutcome {
        total_size: sets.iter().map(Vec::len).sum(),
        sets,
        vertices: ball.elements.len(),
        demand: demand.len(),
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FreeAbelianGroup, FreeGroup};
    use rand::seq::IteratorRandom;

    fn ball(group: &dyn Group, r: usize) -> BallGraph {
        BallGraph::build(group, &group.generators(), r).unwrap()
    }

    #[test]
    fn ball_shapes() {
        let f2 = ball(&FreeGroup::of_rank(2), 2);
        assert_eq!(f2.vertex_count(), 17);
        assert_eq!(f2.edges.len(), 16);
        assert_eq!(f2.interior().len(), 5);
        let z = ball(&FreeAbelianGroup::of_rank(1), 3);
        assert_eq!((z.vertex_count(), z.edges.len()), (7, 6));
        let z2 = ball(&FreeAbelianGroup::of_rank(2), 1);
        assert_eq!((z2.vertex_count(), z2.edges.len()), (5, 4));
        assert_eq!(z2.interior(), vec![0]);
    }

    #[test]
    fn degenerate_labels_rejected() {
        let g = FreeGroup::of_rank(2);
        assert!(BallGraph::build(&g, &[Word::identity()], 2).is_err());
        assert!(BallGraph::build(&g, &[Word::gen(0), Word::gen(0).inv()], 2).is_err());
    }

    #[test]
    fn tree_msf_is_everything() {
        let g = ball(&FreeGroup::of_rank(2), 3);
        let stats = sample_msf(&g, 20, 7, None).unwrap();
        assert_eq!(stats.center_degrees, BTreeMap::from([(4, 20)]));
        assert_eq!(stats.mean_degree, Ratio::from_integer(4));
        let z = ball(&FreeAbelianGroup::of_rank(1), 4);
        assert_eq!(sample_msf(&z, 20, 7, None).unwrap().center_degrees, BTreeMap::from([(2, 20)]));
        assert!(sample_msf(&z, 0, 7, None).is_err());
    }

    #[test]
    fn z2_msf_is_reproducible_and_valid() {
        let g = ball(&FreeAbelianGroup::of_rank(2), 4);
        let s1 = sample_msf(&g, 50, 11, None).unwrap();
        let s2 = sample_msf(&g, 50, 11, None).unwrap();
        assert_eq!(s1, s2);
        assert!(s1.all_valid);
        assert!(s1.mean_degree >= Ratio::from_integer(1) && s1.mean_degree <= Ratio::from_integer(4));
        assert_ne!(sample_forests(&g, 3, 11, None), sample_forests(&g, 3, 12, None));
        let forced = sample_forests(&g, 5, 3, Some(0));
        for f in forced {
            assert!(g.edges.iter().enumerate().filter(|(_, e)| e.label == 0).all(|(i, _)| f.contains(i)));
        }
    }

    #[test]
    fn single_vertex_counts() {
        let g = ball(&FreeGroup::of_rank(2), 3);
        let full = SpanningForest { edges: (0..g.edges.len()).collect() };
        let rep = forest_counting_checks(&g, &full, &[0], &[], None).unwrap();
        assert_eq!(rep.d_a, 4);
        assert_eq!((rep.a.lhs, rep.a.rhs), (3, 2));
        assert_eq!((rep.b.lhs, rep.b.rhs), (5, 3));
        let empty = forest_counting_checks(&g, &full, &[], &[], Some(0)).unwrap();
        assert_eq!(empty.violations(), 0);
        let outer = (0..g.vertex_count()).find(|&v| !g.is_interior(v)).unwrap();
        assert!(forest_counting_checks(&g, &full, &[outer], &[], None).is_err());
    }

    /// Oracle: recompute the left-hand sides by group multiplication.
    #[test]
    fn counting_matches_group_products() {
        let grp = FreeAbelianGroup::of_rank(2);
        let g = ball(&grp, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let interior = g.interior();
        for (t, forest) in sample_forests(&g, 30, 2, Some(0)).into_iter().enumerate() {
            let a_set: Vec<usize> = interior.iter().copied().choose_multiple(&mut rng, 1 + t % 8);
            let b_set: Vec<usize> = interior.iter().copied().choose_multiple(&mut rng, t % 5);
            let rep = forest_counting_checks(&g, &forest, &a_set, &b_set, Some(0)).unwrap();
            assert_eq!(rep.violations(), 0, "{rep:?}");
            let t_inv: Vec<Word> = [Word::identity(), Word::gen(0).inv(), Word::gen(1).inv()].into();
            let (grp, g, t_inv) = (&grp, &g, &t_inv);
            let prod: BTreeSet<Word> =
                a_set.iter().flat_map(|&v| t_inv.iter().map(move |x| grp.mul(&g.elements[v], x))).collect();
            assert_eq!(rep.a.lhs as usize, prod.len());
        }
    }

    #[test]
    fn theta_on_trees_and_paths() {
        let grp = FreeGroup::of_rank(2);
        let g = ball(&grp, 5);
        let full = SpanningForest { edges: (0..g.edges.len()).collect() };
        let out = theta_transform(&g, &full, 0, 1, 2).unwrap();
        assert!(out.acyclic);
        assert_eq!(Alphabet::standard(2).format_all(&out.labels), vec!["b", "a·b·a⁻¹", "a·a"]);
        for e in &out.edges {
            assert_eq!(grp.mul(&g.elements[e.tail], &out.labels[e.label]), g.elements[e.head]);
        }
        let only_a = SpanningForest { edges: (0..g.edges.len()).filter(|&e| g.edges[e].label == 0).collect() };
        let out = theta_transform(&g, &only_a, 0, 1, 2).unwrap();
        assert!(out.acyclic && !out.edges.is_empty());
        assert!(out.edges.iter().all(|e| e.label == 2));
        assert!(matches!(theta_transform(&g, &full, 0, 1, 4), Err(Error::RadiusTooSmall { .. })));
    }

    #[test]
    fn theta_on_z2_forests() {
        let g = ball(&FreeAbelianGroup::of_rank(2), 5);
        for f in sample_forests(&g, 20, 9, None) {
            assert!(theta_transform(&g, &f, 0, 1, 2).unwrap().acyclic);
        }
    }

    #[test]
    fn harnesses() {
        let z2 = ball(&FreeAbelianGroup::of_rank(2), 4);
        let rep = counting_harness(&z2, 20, 1, 0).unwrap();
        assert_eq!(rep.violations, [0; 4]);
        assert_eq!(rep, counting_harness(&z2, 20, 1, 0).unwrap());
        let f2 = ball(&FreeGroup::of_rank(2), 5);
        let th = theta_harness(&f2, 10, 3, 0, 1, 2).unwrap();
        assert_eq!(th.acyclic, 10);
        assert!(th.edges > 0);
    }

    #[test]
    fn schemes() {
        let reg = SchemeRegistry::default();
        assert_eq!(reg.names(), vec!["c", "d", "g", "h"]);
        let g = FreeGroup::of_rank(3);
        let s = g.generators();
        let sizes = |name: &str| reg.get(name).unwrap().sets(&g, &s, Some(0)).unwrap().iter().map(Vec::len).collect::<Vec<_>>();
        assert_eq!(sizes("c"), vec![3, 3]);
        assert_eq!(sizes("d"), vec![6, 6]);
        assert_eq!(sizes("g"), vec![3, 2]);
        assert_eq!(sizes("h"), vec![5, 2]);
        assert!(reg.get("z").is_err());
    }

    #[test]
    fn degree_pipeline_small() {
        let reg = SchemeRegistry::default();
        let f3 = FreeGroup::of_rank(3);
        let out = decomposition_from_degree(&f3, &f3.generators(), 3, reg.get("g").unwrap(), Some(0)).unwrap();
        assert!(out.outcome.is_feasible());
        assert_eq!(out.total_size, 5);
        let z2 = FreeAbelianGroup::of_rank(2);
        let out = decomposition_from_degree(&z2, &z2.generators(), 4, reg.get("c").unwrap(), None).unwrap();
        assert!(!out.outcome.is_feasible());
    }
}
