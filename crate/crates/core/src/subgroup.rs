//! Subgroups of free groups: Stallings graphs, Schreier transversals and the
//! projections `g = π_H(g)·π_T(g)`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::group::AbelianVector;
use crate::word::{Alphabet, Letter, Word};

/// A folded core graph. Vertex 0 is the base vertex; `out[v][x]` is the head
/// of the edge labelled `x` leaving `v`, `inc[v][x]` the tail of the one entering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupGraph {
    rank: usize,
    out: Vec<Vec<Option<usize>>>,
    inc: Vec<Vec<Option<usize>>>,
}

struct Folder {
    parent: Vec<usize>,
    out: Vec<BTreeMap<u16, usize>>,
    inc: Vec<BTreeMap<u16, usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new() -> Self {
        Folder { parent: Vec::new(), out: Vec::new(), inc: Vec::new(), pending: Vec::new() }
    }

    fn vertex(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.out.push(BTreeMap::new());
        self.inc.push(BTreeMap::new());
        self.parent.len() - 1
    }

    fn find(&mut self, v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = v;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn add_edge(&mut self, u: usize, x: u16, v: usize) {
        let (u, v) = (self.find(u), self.find(v));
        match self.out[u].get(&x).copied() {
            Some(w) => {
                let w = self.find(w);
                if w != v {
                    self.pending.push((w, v));
                }
            }
            None => {
                self.out[u].insert(x, v);
            }
        }
        match self.inc[v].get(&x).copied() {
            Some(w) => {
                let w = self.find(w);
                if w != u {
                    self.pending.push((w, u));
                }
            }
            None => {
                self.inc[v].insert(x, u);
            }
        }
    }

    fn fold(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, gone) = if a < b { (a, b) } else { (b, a) };
            self.parent[gone] = keep;
            let out = std::mem::take(&mut self.out[gone]);
            let inc = std::mem::take(&mut self.inc[gone]);
            for (x, t) in out {
                self.add_edge(keep, x, t);
            }
            for (x, s) in inc {
                self.add_edge(s, x, keep);
            }
        }
    }
}

impl SubgroupGraph {
    fn from_edges(rank: usize, n: usize, edges: &[(usize, u16, usize)]) -> Self {
        let mut out = vec![vec![None; rank]; n];
        let mut inc = vec![vec![None; rank]; n];
        for &(u, x, v) in edges {
            out[u][x as usize] = Some(v);
            inc[v][x as usize] = Some(u);
        }
        SubgroupGraph { rank, out, inc }.canonical()
    }

    /// Renumbers vertices in shortlex breadth-first order from the base.
    fn canonical(self) -> Self {
        let n = self.out.len();
        let mut order = vec![usize::MAX; n];
        let mut seq = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0usize]);
        order[0] = 0;
        seq.push(0);
        while let Some(v) = queue.pop_front() {
            for sym in 0..2 * self.rank {
                if let Some(w) = self.step(v, Letter::from_symbol(sym)) {
                    if order[w] == usize::MAX {
                        order[w] = seq.len();
                        seq.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        let m = seq.len();
        let mut out = vec![vec![None; self.rank]; m];
        let mut inc = vec![vec![None; self.rank]; m];
        for &v in &seq {
            for x in 0..self.rank {
                if let Some(w) = self.out[v][x] {
                    out[order[v]][x] = Some(order[w]);
                    inc[order[w]][x] = Some(order[v]);
                }
            }
        }
        SubgroupGraph { rank: self.rank, out, inc }
    }

    /// Folds the bouquet of the generators and prunes hanging trees.
    pub fn stallings_fold(rank: usize, generators: &[Word]) -> Self {
        let mut f = Folder::new();
        let base = f.vertex();
        for g in generators.iter().filter(|g| !g.is_identity()) {
            let n = g.len();
            let mut prev = base;
            for (i, &l) in g.letters().iter().enumerate() {
                let next = if i + 1 == n { base } else { f.vertex() };
                if l.inv {
                    f.add_edge(next, l.gen, prev);
                } else {
                    f.add_edge(prev, l.gen, next);
                }
                prev = next;
            }
        }
        f.fold();
        let mut ids = BTreeMap::new();
        let mut edges = Vec::new();
        for v in 0..f.parent.len() {
            if f.find(v) == v {
                let next = ids.len();
                ids.entry(v).or_insert(next);
            }
        }
        for v in 0..f.parent.len() {
            if f.find(v) != v {
                continue;
            }
            let targets: Vec<(u16, usize)> = f.out[v].iter().map(|(&x, &t)| (x, t)).collect();
            for (x, t) in targets {
                let t = f.find(t);
                edges.push((ids[&v], x, ids[&t]));
            }
        }
        edges.sort();
        edges.dedup();
        let g = Self::prune(ids.len(), edges);
        Self::from_edges(rank, g.0, &g.1)
    }

    fn prune(n: usize, mut edges: Vec<(usize, u16, usize)>) -> (usize, Vec<(usize, u16, usize)>) {
        let mut alive = vec![true; n];
        loop {
            let mut degree = vec![0usize; n];
            for &(u, _, v) in &edges {
                degree[u] += 1;
                degree[v] += 1;
            }
            let dead: Vec<usize> = (1..n).filter(|&v| alive[v] && degree[v] <= 1).collect();
            if dead.is_empty() {
                break;
            }
            for v in dead {
                alive[v] = false;
            }
            edges.retain(|&(u, _, v)| alive[u] && alive[v]);
        }
        let mut ids = vec![usize::MAX; n];
        let mut next = 0;
        for v in 0..n {
            if alive[v] {
                ids[v] = next;
                next += 1;
            }
        }
        (next, edges.into_iter().map(|(u, x, v)| (ids[u], x, ids[v])).collect())
    }

    /// The coset graph of `ker(F → Z/n)` with generator images `images`.
    pub fn kernel_to_cyclic(rank: usize, images: &[i64], modulus: u64) -> Result<Self> {
        if images.len() != rank {
            return Err(Error::AlphabetMismatch(format!("{} images for rank {rank}", images.len())));
        }
        if modulus == 0 {
            return Err(Error::InvalidArgument("modulus must be ≥ 1".into()));
        }
        let n = modulus as i64;
        let edges: Vec<(usize, u16, usize)> = (0..n)
            .flat_map(|v| {
                images.iter().enumerate().map(move |(x, &img)| (v as usize, x as u16, (v + img).rem_euclid(n) as usize))
            })
            .collect();
        // Restrict to the component of 0 (the image subgroup).
        let full = SubgroupGraph::from_edges_raw(rank, n as usize, &edges);
        Ok(full.canonical())
    }

    fn from_edges_raw(rank: usize, n: usize, edges: &[(usize, u16, usize)]) -> Self {
        let mut out = vec![vec![None; rank]; n];
        let mut inc = vec![vec![None; rank]; n];
        for &(u, x, v) in edges {
            out[u][x as usize] = Some(v);
            inc[v][x as usize] = Some(u);
        }
        SubgroupGraph { rank, out, inc }
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().flatten().filter(|e| e.is_some()).count()
    }

    /// Rank of the subgroup, `|E| − |V| + 1`.
    pub fn rank(&self) -> usize {
        (self.edge_count() + 1).saturating_sub(self.vertex_count())
    }

    /// Every vertex has an incoming and outgoing edge for every generator.
    pub fn is_complete(&self) -> bool {
        self.out.iter().chain(&self.inc).all(|row| row.iter().all(Option::is_some))
    }

    /// `[F : H]` when finite.
    pub fn index(&self) -> Option<usize> {
        self.is_complete().then(|| self.vertex_count())
    }

    pub fn step(&self, v: usize, l: Letter) -> Option<usize> {
        if l.inv {
            self.inc[v][l.gen as usize]
        } else {
            self.out[v][l.gen as usize]
        }
    }

    /// The vertex reached by reading `w` from the base, if the path exists.
    pub fn read(&self, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(0usize, |v, &l| self.step(v, l))
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.read(w) == Some(0)
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let mut s = String::from("digraph subgroup {\n  rankdir=LR;\n  0 [shape=doublecircle];\n");
        for (v, row) in self.out.iter().enumerate() {
            for (x, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    let _ = writeln!(s, "  {v} -> {t} [label=\"{}\"];", alphabet.names()[x]);
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// A subgroup supported by the transfer machinery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// Given by its folded Stallings graph.
    Graph(SubgroupGraph),
    /// The commutator subgroup `[F, F]` of the free group of this rank.
    AbelianKernel { rank: usize },
}

impl Subgroup {
    pub fn contains(&self, w: &Word) -> bool {
        match self {
            Subgroup::Graph(g) => g.contains(w),
            Subgroup::AbelianKernel { rank } => w.abelianization(*rank).iter().all(|&c| c == 0),
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            Subgroup::Graph(g) => g.index(),
            Subgroup::AbelianKernel { .. } => None,
        }
    }
}

/// A right transversal `T` containing `1`, with `g = π_H(g)·π_T(g)`.
#[derive(Clone, Debug)]
pub struct CosetTransversal {
    subgroup: Subgroup,
    /// Representative of each coset vertex (finite index only).
    representatives: Vec<Word>,
    pub contains_identity: bool,
}

impl CosetTransversal {
    /// Schreier transversal read off a shortlex breadth-first spanning tree.
    pub fn schreier(subgroup: &Subgroup) -> Result<Self> {
        match subgroup {
            Subgroup::Graph(g) => {
                if !g.is_complete() {
                    return Err(Error::Unsupported("infinite-index subgroup without abelian-kernel structure".into()));
                }
                let n = g.vertex_count();
                let mut reps: Vec<Option<Word>> = vec![None; n];
                reps[0] = Some(Word::identity());
                let mut queue = VecDeque::from([0usize]);
                while let Some(v) = queue.pop_front() {
                    let base = reps[v].clone().expect("visited");
                    for sym in 0..2 * g.ambient_rank() {
                        let l = Letter::from_symbol(sym);
                        if let Some(w) = g.step(v, l) {
                            if reps[w].is_none() {
                                reps[w] = Some(base.mul(&Word::letter(l)));
                                queue.push_back(w);
                            }
                        }
                    }
                }
                Ok(CosetTransversal {
                    subgroup: subgroup.clone(),
                    representatives: reps.into_iter().map(|r| r.expect("connected")).collect(),
                    contains_identity: true,
                })
            }
            Subgroup::AbelianKernel { .. } => {
                Ok(CosetTransversal { subgroup: subgroup.clone(), representatives: Vec::new(), contains_identity: true })
            }
        }
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    /// The finite list of representatives, ordered by coset vertex.
    pub fn representatives(&self) -> Option<&[Word]> {
        match self.subgroup {
            Subgroup::Graph(_) => Some(&self.representatives),
            Subgroup::AbelianKernel { .. } => None,
        }
    }

    /// Lattice representative `x1^v1 ⋯ xd^vd` for a point of `Z^d`.
    pub fn lattice_representative(v: &AbelianVector) -> Word {
        v.to_word()
    }

    pub fn pi_t(&self, g: &Word) -> Word {
        match &self.subgroup {
            Subgroup::Graph(graph) => {
                let v = graph.read(g).expect("complete coset table");
                self.representatives[v].clone()
            }
            Subgroup::AbelianKernel { rank } => AbelianVector::of_word(g, *rank).to_word(),
        }
    }

    pub fn pi_h(&self, g: &Word) -> Word {
        g.mul(&self.pi_t(g).inv())
    }

    /// `(π_H(g), π_T(g))`.
    pub fn project(&self, g: &Word) -> (Word, Word) {
        let t = self.pi_t(g);
        (g.mul(&t.inv()), t)
    }

    pub fn is_representative(&self, w: &Word) -> bool {
        self.pi_t(w) == *w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Alphabet {
        Alphabet::standard(2)
    }

    #[test]
    fn fold_example_membership() {
        let a = f2();
        let gens = a.parse_all(&["a·a", "b", "a·b·a⁻¹"]).unwrap();
        let h = SubgroupGraph::stallings_fold(2, &gens);
        // Oracle: every generator lies in the kernel of a ↦ 1, b ↦ 0 (mod 2),
        // which does not contain a.
        for g in &gens {
            assert_eq!(g.abelianization(2)[0].rem_euclid(2), 0);
        }
        assert!(!h.contains(&a.parse("a").unwrap()));
        assert!(h.contains(&a.parse("a·a").unwrap()));
        assert_eq!(h.index(), Some(2));
        assert_eq!(h.rank(), 3);
    }

    #[test]
    fn fold_whole_and_trivial() {
        let h = SubgroupGraph::stallings_fold(2, &[Word::gen(0), Word::gen(1)]);
        assert_eq!(h.rank(), 2);
        assert_eq!(h.index(), Some(1));
        let t = SubgroupGraph::stallings_fold(2, &[]);
        assert_eq!(t.rank(), 0);
        assert_eq!(t.vertex_count(), 1);
        assert!(t.contains(&Word::identity()));
        assert!(!t.contains(&Word::gen(0)));
    }

    #[test]
    fn fold_prunes_hanging_trees() {
        let a = f2();
        // a·b·a⁻¹ conjugate: core is a single b-loop at a non-base vertex plus the a-stem.
        let h = SubgroupGraph::stallings_fold(2, &[a.parse("a·b·a⁻¹").unwrap(), a.parse("a·b·b·a⁻¹").unwrap()]);
        assert_eq!(h.rank(), 1);
        assert!(h.contains(&a.parse("a·b^5·a⁻¹").unwrap()));
    }

    #[test]
    fn transversal_of_index_two_kernel() {
        let a = f2();
        let h = Subgroup::Graph(SubgroupGraph::kernel_to_cyclic(2, &[1, 1], 2).unwrap());
        let t = CosetTransversal::schreier(&h).unwrap();
        assert_eq!(a.format_all(t.representatives().unwrap()), vec!["1", "a"]);
        let (hh, tt) = t.project(&a.parse("a·a").unwrap());
        assert_eq!((a.format(&hh), a.format(&tt)), ("a·a".into(), "1".into()));
        let (hh, tt) = t.project(&a.parse("b").unwrap());
        assert_eq!((a.format(&hh), a.format(&tt)), ("b·a⁻¹".into(), "a".into()));
        assert_eq!(t.project(&Word::identity()), (Word::identity(), Word::identity()));
    }

    #[test]
    fn transversal_of_whole_group() {
        let h = Subgroup::Graph(SubgroupGraph::stallings_fold(2, &[Word::gen(0), Word::gen(1)]));
        let t = CosetTransversal::schreier(&h).unwrap();
        assert_eq!(t.representatives().unwrap(), &[Word::identity()]);
    }

    #[test]
    fn commutator_subgroup_projection() {
        let a = f2();
        let t = CosetTransversal::schreier(&Subgroup::AbelianKernel { rank: 2 }).unwrap();
        assert_eq!(a.format(&t.pi_t(&a.parse("b·a·b⁻¹").unwrap())), "a");
    }

    #[test]
    fn infinite_index_graph_rejected() {
        let h = Subgroup::Graph(SubgroupGraph::stallings_fold(2, &[Word::gen(0)]));
        assert!(CosetTransversal::schreier(&h).is_err());
    }

    #[test]
    fn kernel_fold_agrees_with_cyclic_table() {
        // Schreier generators of ker(a,b ↦ 1 mod 3) fold to the 3-vertex table.
        let a = f2();
        let gens = a.parse_all(&["a^3", "b·a⁻¹", "a·b·a^-2", "a^2·b"]).unwrap();
        let folded = SubgroupGraph::stallings_fold(2, &gens);
        let table = SubgroupGraph::kernel_to_cyclic(2, &[1, 1], 3).unwrap();
        assert_eq!(folded, table);
    }
}
