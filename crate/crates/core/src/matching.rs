//! Spanning evenly colored k-subgraphs of finite colored digraphs.
//!
//! A demanded vertex needs one incoming edge of every color, and every tail
//! may spend its single outgoing edge once. That is a bipartite matching
//! between `(vertex, color)` slots and tails, solved with Hopcroft–Karp. When
//! the matching falls short, the slots reachable from unmatched ones by
//! alternating paths form a Hall violator.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{cayley_ball, Group};
use crate::word::{Alphabet, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    /// One-based.
    pub color: usize,
    pub label: Word,
}

#[derive(Clone, Debug)]
pub struct ColoredDigraph {
    k: usize,
    names: Vec<String>,
    interior: Vec<bool>,
    edges: Vec<Edge>,
    alphabet: Alphabet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub k: usize,
    pub vertices: Vec<String>,
    pub interior: Vec<usize>,
    pub edges: Vec<EdgeJson>,
    pub alphabet: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub tail: usize,
    pub head: usize,
    pub color: usize,
    pub label: String,
}

impl ColoredDigraph {
    /// Validates endpoints, colors and the one-edge-per-color-per-pair rule.
    pub fn new(k: usize, names: Vec<String>, interior: Vec<bool>, edges: Vec<Edge>, alphabet: Alphabet) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be ≥ 1".into()));
        }
        if interior.len() != names.len() {
            return Err(Error::InvalidArgument("interior marking length differs from vertex count".into()));
        }
        let n = names.len();
        let mut seen = HashSet::new();
        for e in &edges {
            if e.tail >= n || e.head >= n {
                return Err(Error::InvalidArgument(format!("edge {}→{} out of range", e.tail, e.head)));
            }
            if e.color == 0 || e.color > k {
                return Err(Error::InvalidArgument(format!("color {} outside 1..={k}", e.color)));
            }
            if !seen.insert((e.tail, e.head, e.color)) {
                return Err(Error::InvalidArgument(format!("two edges of color {} from {} to {}", e.color, e.tail, e.head)));
            }
        }
        Ok(ColoredDigraph { k, names, interior, edges, alphabet })
    }

    /// Unlabeled graph with vertices named by index.
    pub fn unlabeled(k: usize, n: usize, edges: &[(usize, usize, usize)]) -> Result<Self> {
        let edges = edges.iter().map(|&(tail, head, color)| Edge { tail, head, color, label: Word::identity() }).collect();
        ColoredDigraph::new(k, (0..n).map(|i| i.to_string()).collect(), vec![true; n], edges, Alphabet::standard(1))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.names.len()).filter(|&v| self.interior[v]).collect()
    }

    pub fn all_vertices(&self) -> Vec<usize> {
        (0..self.names.len()).collect()
    }

    /// Index of the edge `tail → head` of the given color.
    pub fn find_edge(&self, tail: usize, head: usize, color: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.tail == tail && e.head == head && e.color == color)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            k: self.k,
            vertices: self.names.clone(),
            interior: self.interior(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson { tail: e.tail, head: e.head, color: e.color, label: self.alphabet.format(&e.label) })
                .collect(),
            alphabet: self.alphabet.names().to_vec(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        let alphabet = Alphabet::new(json.alphabet.iter().cloned())?;
        let mut interior = vec![false; json.vertices.len()];
        for &v in &json.interior {
            *interior.get_mut(v).ok_or_else(|| Error::InvalidArgument(format!("interior vertex {v} out of range")))? = true;
        }
        let edges = json
            .edges
            .iter()
            .map(|e| Ok(Edge { tail: e.tail, head: e.head, color: e.color, label: alphabet.parse(&e.label)? }))
            .collect::<Result<Vec<_>>>()?;
        ColoredDigraph::new(json.k, json.vertices.clone(), interior, edges, alphabet)
    }

    /// DOT with chosen edges drawn bold.
    pub fn to_dot(&self, chosen: Option<&EvenSubgraph>) -> String {
        const PALETTE: [&str; 6] = ["red", "blue", "darkgreen", "orange", "purple", "brown"];
        let chosen: HashSet<usize> = chosen.map(|c| c.edges.iter().copied().collect()).unwrap_or_default();
        let mut s = String::from("digraph colored {\n");
        for (v, name) in self.names.iter().enumerate() {
            let shape = if self.interior[v] { "circle" } else { "box" };
            let _ = writeln!(s, "  {v} [label=\"{name}\", shape={shape}];");
        }
        for (i, e) in self.edges.iter().enumerate() {
            let color = PALETTE[(e.color - 1) % PALETTE.len()];
            let style = if chosen.contains(&i) { ", penwidth=3" } else { ", style=dashed" };
            let _ =
                writeln!(s, "  {} -> {} [color={color}, label=\"{}\"{style}];", e.tail, e.head, self.alphabet.format(&e.label));
        }
        s.push_str("}\n");
        s
    }
}

/// A colored ball of `Cay(G, (S₁,…,S_k))` together with its element table.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub graph: ColoredDigraph,
    pub elements: Vec<Word>,
    pub dist: Vec<usize>,
    pub radius: usize,
    pub interior_radius: usize,
    index: HashMap<Word, usize>,
}

impl CayleyBall {
    /// Ball of radius `r` in the word metric of `metric`. An edge `g → g·s`
    /// of color `i` is present for `s ∈ S_i` whenever both ends are in the
    /// ball; vertices within `r − c` are interior, `c` being the longest
    /// label in the same metric.
    pub fn build(group: &dyn Group, sets: &[Vec<Word>], metric: &[Word], r: usize) -> Result<Self> {
        let ball = cayley_ball(group, metric, r);
        let elements: Vec<Word> = ball.iter().map(|b| b.element.clone()).collect();
        let dist: Vec<usize> = ball.iter().map(|b| b.dist).collect();
        let index: HashMap<Word, usize> = elements.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut c = 0;
        for s in sets.iter().flatten() {
            match index.get(&group.normal_form(s)) {
                Some(&i) => c = c.max(dist[i]),
                None => return Err(Error::RadiusTooSmall { radius: r, needed: r + 1 }),
            }
        }
        let interior_radius = r - c;
        let mut edges = Vec::new();
        for (g_idx, g) in elements.iter().enumerate() {
            for (i, set) in sets.iter().enumerate() {
                let mut used = BTreeSet::new();
                for s in set {
                    let s = group.normal_form(s);
                    if !used.insert(s.clone()) {
                        continue;
                    }
                    if let Some(&h) = index.get(&group.mul(g, &s)) {
                        edges.push(Edge { tail: g_idx, head: h, color: i + 1, label: s });
                    }
                }
            }
        }
        let alphabet = group.alphabet();
        let names = elements.iter().map(|w| alphabet.format(w)).collect();
        let interior = dist.iter().map(|&d| d <= interior_radius).collect();
        let graph = ColoredDigraph::new(sets.len(), names, interior, edges, alphabet.clone())?;
        Ok(CayleyBall { graph, elements, dist, radius: r, interior_radius, index })
    }

    pub fn vertex_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }
}

/// A set of chosen edges of a [`ColoredDigraph`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenSubgraph {
    pub edges: Vec<usize>,
}

/// Degree-recount findings for a candidate subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphCheck {
    pub max_out: usize,
    pub max_in_per_color: usize,
    /// Demanded `(vertex, color)` slots without an incoming edge.
    pub unmet: Vec<(usize, usize)>,
}

impl SubgraphCheck {
    pub fn ok(&self) -> bool {
        self.max_out <= 1 && self.max_in_per_color <= 1 && self.unmet.is_empty()
    }
}

impl EvenSubgraph {
    pub fn check(&self, g: &ColoredDigraph, demand: &[usize]) -> SubgraphCheck {
        let n = g.vertex_count();
        let mut out = vec![0usize; n];
        let mut inc = vec![vec![0usize; g.k]; n];
        for &e in &self.edges {
            let edge = &g.edges[e];
            out[edge.tail] += 1;
            inc[edge.head][edge.color - 1] += 1;
        }
        let mut unmet = Vec::new();
        for &v in demand {
            for (c, &count) in inc[v].iter().enumerate() {
                if count == 0 {
                    unmet.push((v, c + 1));
                }
            }
        }
        SubgraphCheck {
            max_out: out.into_iter().max().unwrap_or(0),
            max_in_per_color: inc.into_iter().flatten().max().unwrap_or(0),
            unmet,
        }
    }

    pub fn is_valid(&self, g: &ColoredDigraph, demand: &[usize]) -> bool {
        self.check(g, demand).ok()
    }
}

/// Sets `A₁,…,A_k` with `|⋃ V^{−,i}(A_i)| < Σ|A_i|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallCertificate {
    pub sets: Vec<Vec<usize>>,
    pub margin: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchOutcome {
    Feasible(EvenSubgraph),
    Infeasible(HallCertificate),
}

impl MatchOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, MatchOutcome::Feasible(_))
    }

    pub fn subgraph(&self) -> Option<&EvenSubgraph> {
        match self {
            MatchOutcome::Feasible(s) => Some(s),
            MatchOutcome::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&HallCertificate> {
        match self {
            MatchOutcome::Feasible(_) => None,
            MatchOutcome::Infeasible(c) => Some(c),
        }
    }
}

/// `|⋃_i V^{−,i}(A_i)| − Σ|A_i|`.
pub fn hall_check(g: &ColoredDigraph, sets: &[Vec<usize>]) -> i64 {
    let mut targets: Vec<HashSet<usize>> = vec![HashSet::new(); g.k];
    for (i, set) in sets.iter().enumerate().take(g.k) {
        targets[i].extend(set.iter().copied());
    }
    let tails: HashSet<usize> = g.edges.iter().filter(|e| targets[e.color - 1].contains(&e.head)).map(|e| e.tail).collect();
    let total: usize = targets.iter().map(|t| t.len()).sum();
    tails.len() as i64 - total as i64
}

const INF: usize = usize::MAX;

/// Hopcroft–Karp on slots (left) versus tails (right). Adjacency lists keep
/// edge input order, which fixes tie-breaking.
struct Matcher {
    adj: Vec<Vec<(usize, usize)>>,
    pair_l: Vec<Option<(usize, usize)>>,
    pair_r: Vec<Option<usize>>,
    dist: Vec<usize>,
}

impl Matcher {
    fn new(adj: Vec<Vec<(usize, usize)>>, right: usize) -> Self {
        let left = adj.len();
        Matcher { adj, pair_l: vec![None; left], pair_r: vec![None; right], dist: vec![INF; left] }
    }

    fn bfs(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for l in 0..self.adj.len() {
            if self.pair_l[l].is_none() {
                self.dist[l] = 0;
                queue.push_back(l);
            } else {
                self.dist[l] = INF;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &(r, _) in &self.adj[l] {
                match self.pair_r[r] {
                    None => found = true,
                    Some(l2) if self.dist[l2] == INF => {
                        self.dist[l2] = self.dist[l] + 1;
                        queue.push_back(l2);
                    }
                    _ => {}
                }
            }
        }
        found
    }

    fn dfs(&mut self, start: usize, it: &mut [usize]) -> bool {
        let mut stack = vec![start];
        while let Some(&l) = stack.last() {
            if it[l] >= self.adj[l].len() {
                self.dist[l] = INF;
                stack.pop();
                if let Some(&p) = stack.last() {
                    it[p] += 1;
                }
                continue;
            }
            let (r, _) = self.adj[l][it[l]];
            match self.pair_r[r] {
                None => {
                    for &x in &stack {
                        let (rr, ee) = self.adj[x][it[x]];
                        self.pair_l[x] = Some((rr, ee));
                        self.pair_r[rr] = Some(x);
                    }
                    return true;
                }
                Some(l2) if self.dist[l2] != INF && self.dist[l2] == self.dist[l] + 1 => stack.push(l2),
                _ => it[l] += 1,
            }
        }
        false
    }

    fn run(&mut self) {
        while self.bfs() {
            let mut it = vec![0; self.adj.len()];
            for l in 0..self.adj.len() {
                if self.pair_l[l].is_none() {
                    self.dfs(l, &mut it);
                }
            }
        }
    }
}

/// A spanning evenly colored k-subgraph saturating `demand`, or a Hall
/// violator inside `demand`.
pub fn find_even_k_subgraph(g: &ColoredDigraph, demand: &[usize]) -> MatchOutcome {
    let demand: Vec<usize> = demand.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let k = g.k;
    let slot_of: HashMap<usize, usize> = demand.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); demand.len() * k];
    for (e, edge) in g.edges.iter().enumerate() {
        if let Some(&i) = slot_of.get(&edge.head) {
            adj[i * k + edge.color - 1].push((edge.tail, e));
        }
    }
    let mut m = Matcher::new(adj, g.vertex_count());
    m.run();
    if m.pair_l.iter().all(|p| p.is_some()) {
        let mut edges: Vec<usize> = m.pair_l.iter().map(|p| p.expect("all matched").1).collect();
        edges.sort_unstable();
        let sub = EvenSubgraph { edges };
        debug_assert!(sub.is_valid(g, &demand));
        return MatchOutcome::Feasible(sub);
    }
    // Alternating reachability from unmatched slots.
    let mut seen_l = vec![false; m.adj.len()];
    let mut queue: VecDeque<usize> = (0..m.adj.len()).filter(|&l| m.pair_l[l].is_none()).collect();
    for &l in &queue {
        seen_l[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &(r, _) in &m.adj[l] {
            if let Some(l2) = m.pair_r[r] {
                if !seen_l[l2] {
                    seen_l[l2] = true;
                    queue.push_back(l2);
                }
            }
        }
    }
    let mut sets = vec![Vec::new(); k];
    for (l, &s) in seen_l.iter().enumerate() {
        if s {
            sets[l % k].push(demand[l / k]);
        }
    }
    let margin = hall_check(g, &sets);
    assert!(margin < 0, "alternating-path certificate must violate the Hall condition");
    MatchOutcome::Infeasible(HallCertificate { sets, margin })
}

/// Result of the uncolored search: `k` incoming edges per demanded vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KOutcome {
    Subgraph(Vec<usize>),
    /// A set `A` with `|V⁻(A)| < k|A|`.
    Violator(Vec<usize>),
}

/// Ignores colors of `g`; each edge is duplicated into `k` colors and the
/// colored search is run on the copy.
pub fn find_k_subgraph(g: &ColoredDigraph, demand: &[usize], k: usize) -> Result<KOutcome> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be ≥ 1".into()));
    }
    let mut edges = Vec::with_capacity(g.edges.len() * k);
    for e in &g.edges {
        for c in 1..=k {
            edges.push(Edge { tail: e.tail, head: e.head, color: c, label: e.label.clone() });
        }
    }
    let dup = ColoredDigraph { k, names: g.names.clone(), interior: g.interior.clone(), edges, alphabet: g.alphabet.clone() };
    Ok(match find_even_k_subgraph(&dup, demand) {
        MatchOutcome::Feasible(s) => {
            let mut chosen: Vec<usize> = s.edges.iter().map(|&e| e / k).collect();
            chosen.sort_unstable();
            chosen.dedup();
            KOutcome::Subgraph(chosen)
        }
        MatchOutcome::Infeasible(c) => {
            let a: BTreeSet<usize> = c.sets.into_iter().flatten().collect();
            KOutcome::Violator(a.into_iter().collect())
        }
    })
}

/// `|V⁻(A)| − k|A|` ignoring colors.
pub fn uncolored_margin(g: &ColoredDigraph, a: &[usize], k: usize) -> i64 {
    let set: HashSet<usize> = a.iter().copied().collect();
    let tails: HashSet<usize> = g.edges.iter().filter(|e| set.contains(&e.head)).map(|e| e.tail).collect();
    tails.len() as i64 - (k * set.len()) as i64
}
