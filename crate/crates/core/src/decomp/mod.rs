//! Paradoxical decompositions: data model, verifiers and constructions.
//!
//! A k-paradoxical decomposition has translating sets `S₁,…,S_k` and
//! pairwise disjoint pieces `P_{i,j}` with `G = ⋃_j P_{i,j}·g_{i,j}` for
//! every color `i`. Pieces are either automata over reduced words (exact
//! verification in a free group) or finite word sets (verification on a
//! Cayley ball).

mod normalize;

pub use normalize::{normalize, NormalizeOutcome};

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{cayley_ball, Group};
use crate::matching::{CayleyBall, EvenSubgraph};
use crate::regset::{RegSet, RegSetJson};
use crate::subgroup::SubgroupGraph;
use crate::word::{Alphabet, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    Symbolic(RegSet),
    Finite(BTreeSet<Word>),
}

impl Piece {
    pub fn member(&self, w: &Word) -> bool {
        match self {
            Piece::Symbolic(r) => r.member(w),
            Piece::Finite(s) => s.contains(w),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Ball,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    alphabet: Alphabet,
    sets: Vec<Vec<Word>>,
    pieces: Vec<Vec<Piece>>,
    mode: Mode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub k: usize,
    pub alphabet: Vec<String>,
    pub translating_sets: Vec<Vec<String>>,
    pub pieces: Vec<Vec<PieceJson>>,
    pub mode: Mode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PieceJson {
    Symbolic(RegSetJson),
    Finite(Vec<String>),
}

impl Decomposition {
    pub fn new(alphabet: Alphabet, sets: Vec<Vec<Word>>, pieces: Vec<Vec<Piece>>) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::InvalidArgument(format!("k = {} but at least 2 colors are needed", sets.len())));
        }
        if pieces.len() != sets.len() {
            return Err(Error::InvalidArgument("one row of pieces per translating set".into()));
        }
        let mut mode = None;
        for (i, (set, row)) in sets.iter().zip(&pieces).enumerate() {
            if set.len() != row.len() {
                return Err(Error::InvalidArgument(format!("color {}: {} elements but {} pieces", i + 1, set.len(), row.len())));
            }
            let distinct: HashSet<&Word> = set.iter().collect();
            if distinct.len() != set.len() {
                return Err(Error::InvalidArgument(format!("translating set {} has repeated entries", i + 1)));
            }
            for w in set {
                alphabet.check(w)?;
            }
            for p in row {
                let m = match p {
                    Piece::Symbolic(r) => {
                        if r.rank() != alphabet.rank() {
                            return Err(Error::AlphabetMismatch(format!(
                                "piece over rank {} in a rank-{} decomposition",
                                r.rank(),
                                alphabet.rank()
                            )));
                        }
                        Mode::Symbolic
                    }
                    Piece::Finite(_) => Mode::Ball,
                };
                if mode.is_some_and(|x| x != m) {
                    return Err(Error::ModeMismatch("pieces mix symbolic and finite sets".into()));
                }
                mode = Some(m);
            }
        }
        let mode = mode.unwrap_or(Mode::Ball);
        Ok(Decomposition { alphabet, sets, pieces, mode })
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn translating_sets(&self) -> &[Vec<Word>] {
        &self.sets
    }

    pub fn pieces(&self) -> &[Vec<Piece>] {
        &self.pieces
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `Σ |S_i|`.
    pub fn tarski_size(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    /// Longest translating element, in letters.
    pub fn max_translation_length(&self) -> usize {
        self.sets.iter().flatten().map(Word::len).max().unwrap_or(0)
    }

    /// Ping-pong decomposition on generators `x`, `y` of a free group:
    /// `L(x⁻¹)·1 ∪ L(x)·x⁻¹ = G` and `L(y⁻¹)·1 ∪ L(y)·y⁻¹ = G`.
    pub fn pingpong(alphabet: Alphabet, x: u16, y: u16) -> Result<Self> {
        let rank = alphabet.rank();
        if x == y || x as usize >= rank || y as usize >= rank {
            return Err(Error::InvalidArgument(format!("need two distinct generators below rank {rank}")));
        }
        let color = |g: u16| {
            let (pos, neg) = (Letter::pos(g), Letter::neg(g));
            (
                vec![Word::identity(), Word::letter(neg)],
                vec![Piece::Symbolic(RegSet::ending_in(rank, neg)), Piece::Symbolic(RegSet::ending_in(rank, pos))],
            )
        };
        let (s1, p1) = color(x);
        let (s2, p2) = color(y);
        Decomposition::new(alphabet, vec![s1, s2], vec![p1, p2])
    }

    /// [`Decomposition::pingpong`] on `a`, `b` of `F₂`.
    pub fn pingpong_f2() -> Self {
        Decomposition::pingpong(Alphabet::standard(2), 0, 1).expect("valid")
    }

    pub fn to_json(&self) -> DecompositionJson {
        let a = &self.alphabet;
        DecompositionJson {
            k: self.k(),
            alphabet: a.names().to_vec(),
            translating_sets: self.sets.iter().map(|s| a.format_all(s)).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| match p {
                            Piece::Symbolic(r) => PieceJson::Symbolic(r.to_json(a)),
                            Piece::Finite(s) => PieceJson::Finite(a.format_all(s)),
                        })
                        .collect()
                })
                .collect(),
            mode: self.mode,
        }
    }

    pub fn from_json(json: &DecompositionJson) -> Result<Self> {
        let alphabet = Alphabet::new(json.alphabet.iter().cloned())?;
        let sets = json.translating_sets.iter().map(|s| alphabet.parse_all(s)).collect::<Result<Vec<_>>>()?;
        let pieces = json
            .pieces
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| {
                        Ok(match p {
                            PieceJson::Symbolic(r) => Piece::Symbolic(RegSet::from_json(r, &alphabet)?),
                            PieceJson::Finite(ws) => Piece::Finite(alphabet.parse_all(ws)?.into_iter().collect()),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if json.k != sets.len() {
            return Err(Error::Parse(format!("k = {} but {} translating sets", json.k, sets.len())));
        }
        let d = Decomposition::new(alphabet, sets, pieces)?;
        if d.mode != json.mode {
            return Err(Error::ModeMismatch(format!("declared {:?}, pieces are {:?}", json.mode, d.mode)));
        }
        Ok(d)
    }

    fn symbolic_pieces(&self) -> Result<Vec<Vec<&RegSet>>> {
        if self.mode != Mode::Symbolic {
            return Err(Error::ModeMismatch("exact verification needs symbolic pieces".into()));
        }
        Ok(self
            .pieces
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| match p {
                        Piece::Symbolic(r) => r,
                        Piece::Finite(_) => unreachable!("mode checked"),
                    })
                    .collect()
            })
            .collect())
    }

    /// Ball-mode decomposition read off a chosen subgraph: `P_{i,j}` is the
    /// set of tails of chosen edges with color `i` and label `g_{i,j}`.
    pub fn from_subgraph(ball: &CayleyBall, chosen: &EvenSubgraph, sets: &[Vec<Word>], alphabet: Alphabet) -> Result<Self> {
        let mut pieces: Vec<Vec<BTreeSet<Word>>> = sets.iter().map(|s| vec![BTreeSet::new(); s.len()]).collect();
        for &e in &chosen.edges {
            let edge = &ball.graph.edges()[e];
            let i = edge.color - 1;
            let j = sets[i]
                .iter()
                .position(|s| *s == edge.label)
                .ok_or_else(|| Error::InvalidArgument(format!("edge label not in translating set {}", edge.color)))?;
            pieces[i][j].insert(ball.elements[edge.tail].clone());
        }
        let pieces = pieces.into_iter().map(|row| row.into_iter().map(Piece::Finite).collect()).collect();
        Decomposition::new(alphabet, sets.to_vec(), pieces)
    }

    /// The edges `g → g·g_{i,j}` of the ball with `g ∈ P_{i,j}`.
    pub fn ball_subgraph(&self, ball: &CayleyBall) -> EvenSubgraph {
        let mut edges = Vec::new();
        for (e, edge) in ball.graph.edges().iter().enumerate() {
            let i = edge.color - 1;
            if i >= self.k() {
                continue;
            }
            if let Some(j) = self.sets[i].iter().position(|s| *s == edge.label) {
                if self.pieces[i][j].member(&ball.elements[edge.tail]) {
                    edges.push(e);
                }
            }
        }
        EvenSubgraph { edges }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub disjoint_ok: bool,
    pub cover_ok: Vec<bool>,
    pub strong_ok: Vec<bool>,
    /// Shortlex-least witnesses of every failed flag, merged in shortlex order.
    pub counterexamples: Vec<Word>,
    pub checked_radius: Option<usize>,
    pub interior_radius: Option<usize>,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.disjoint_ok && self.cover_ok.iter().all(|&b| b) && self.strong_ok.iter().all(|&b| b)
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        json!({
            "disjoint_ok": self.disjoint_ok,
            "cover_ok": self.cover_ok,
            "strong_ok": self.strong_ok,
            "counterexamples": alphabet.format_all(&self.counterexamples),
            "checked_radius": self.checked_radius,
            "interior_radius": self.interior_radius,
            "all_ok": self.all_ok(),
        })
    }
}

/// Symbolic verification in the free group.
pub fn verify_exact(d: &Decomposition) -> Result<VerificationReport> {
    let pieces = d.symbolic_pieces()?;
    let rank = d.alphabet.rank();
    let mut witnesses = BTreeSet::new();
    let flat: Vec<&RegSet> = pieces.iter().flatten().copied().collect();
    let mut disjoint_ok = true;
    for x in 0..flat.len() {
        for y in x + 1..flat.len() {
            let both = flat[x].intersect(flat[y])?;
            if let Some(w) = both.shortest_member() {
                disjoint_ok = false;
                witnesses.insert(w);
            }
        }
    }
    let all = RegSet::all(rank);
    let mut cover_ok = Vec::new();
    let mut strong_ok = Vec::new();
    for (row, set) in pieces.iter().zip(&d.sets) {
        let translates: Vec<RegSet> = row.iter().zip(set).map(|(p, g)| p.translate(g)).collect();
        let mut union = RegSet::empty(rank);
        for t in &translates {
            union = union.union(t)?;
        }
        let missing = all.difference(&union)?;
        cover_ok.push(missing.is_empty());
        witnesses.extend(missing.shortest_member());
        let mut strong = true;
        for x in 0..translates.len() {
            for y in x + 1..translates.len() {
                if let Some(w) = translates[x].intersect(&translates[y])?.shortest_member() {
                    strong = false;
                    witnesses.insert(w);
                }
            }
        }
        strong_ok.push(strong);
    }
    Ok(VerificationReport {
        disjoint_ok,
        cover_ok,
        strong_ok,
        counterexamples: witnesses.into_iter().collect(),
        checked_radius: None,
        interior_radius: None,
    })
}

/// Ball verification with arbitrary piece membership `member(i, j, w)`.
///
/// Disjointness is checked on `B_r`; covering and uniqueness for every `h`
/// within `r − c`, where `c` is the longest translating element.
pub fn verify_ball_with(
    group: &dyn Group,
    sets: &[Vec<Word>],
    member: impl Fn(usize, usize, &Word) -> bool + Sync,
    r: usize,
) -> Result<VerificationReport> {
    let gens = group.generators();
    let ball = cayley_ball(group, &gens, r);
    let dist_of: BTreeMap<&Word, usize> = ball.iter().map(|b| (&b.element, b.dist)).collect();
    let mut c = 0;
    for g in sets.iter().flatten() {
        match dist_of.get(&group.normal_form(g)) {
            Some(&d) => c = c.max(d),
            None => return Err(Error::RadiusTooSmall { radius: r, needed: g.len() }),
        }
    }
    let interior = r - c;
    let mut witnesses = BTreeSet::new();
    let mut disjoint_ok = true;
    for b in &ball {
        let hits = (0..sets.len())
            .flat_map(|i| (0..sets[i].len()).map(move |j| (i, j)))
            .filter(|&(i, j)| member(i, j, &b.element))
            .count();
        if hits > 1 {
            disjoint_ok = false;
            witnesses.insert(b.element.clone());
            break;
        }
    }
    let mut cover_ok = vec![true; sets.len()];
    let mut strong_ok = vec![true; sets.len()];
    let inverses: Vec<Vec<Word>> = sets.iter().map(|s| s.iter().map(|g| group.inv(g)).collect()).collect();
    for b in ball.iter().filter(|b| b.dist <= interior) {
        for i in 0..sets.len() {
            let count = inverses[i].iter().enumerate().filter(|(j, ginv)| member(i, *j, &group.mul(&b.element, ginv))).count();
            if count == 0 && cover_ok[i] {
                cover_ok[i] = false;
                witnesses.insert(b.element.clone());
            }
            if count > 1 && strong_ok[i] {
                strong_ok[i] = false;
                witnesses.insert(b.element.clone());
            }
        }
    }
    Ok(VerificationReport {
        disjoint_ok,
        cover_ok,
        strong_ok,
        counterexamples: witnesses.into_iter().collect(),
        checked_radius: Some(r),
        interior_radius: Some(interior),
    })
}

pub fn verify_ball(d: &Decomposition, group: &dyn Group, r: usize) -> Result<VerificationReport> {
    if group.rank() != d.alphabet.rank() {
        return Err(Error::AlphabetMismatch(format!("group rank {} vs decomposition rank {}", group.rank(), d.alphabet.rank())));
    }
    verify_ball_with(group, &d.sets, |i, j, w| d.pieces[i][j].member(w), r)
}

/// Whether every element within `radius` lies in exactly one piece; returns
/// the shortlex-least offender otherwise.
pub fn ball_partition(d: &Decomposition, group: &dyn Group, radius: usize) -> Option<Word> {
    let ball = cayley_ball(group, &group.generators(), radius);
    ball.into_iter().map(|b| b.element).find(|w| d.pieces.iter().flatten().filter(|p| p.member(w)).count() != 1)
}

/// Replaces each `S_i` by `S_i·g_i`, keeping the pieces.
pub fn translate_decomposition(d: &Decomposition, shifts: &[Word]) -> Result<Decomposition> {
    if shifts.len() != d.k() {
        return Err(Error::InvalidArgument(format!("{} shifts for {} colors", shifts.len(), d.k())));
    }
    let sets = d
        .sets
        .iter()
        .zip(shifts)
        .map(|(s, g)| {
            d.alphabet.check(g)?;
            Ok(s.iter().map(|x| x.mul(g)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Decomposition::new(d.alphabet.clone(), sets, d.pieces.clone())
}

/// Composition of a k- and an l-paradoxical decomposition into a
/// kl-paradoxical one with translating sets `S_i·T_j`.
///
/// Color `(i, j)` has label `g_{i,a}·h_{j,b}` with piece
/// `P_{i,a} ∩ Q_{j,b}·g_{i,a}⁻¹`; pieces sharing a label are merged.
pub fn double_up(d: &Decomposition, e: &Decomposition) -> Result<Decomposition> {
    if d.alphabet.rank() != e.alphabet.rank() {
        return Err(Error::AlphabetMismatch(format!("rank {} vs rank {}", d.alphabet.rank(), e.alphabet.rank())));
    }
    let p = d.symbolic_pieces()?;
    let q = e.symbolic_pieces()?;
    let mut sets = Vec::new();
    let mut pieces = Vec::new();
    for (i, si) in d.sets.iter().enumerate() {
        for (j, tj) in e.sets.iter().enumerate() {
            let mut by_label: BTreeMap<Word, RegSet> = BTreeMap::new();
            for (a, g) in si.iter().enumerate() {
                for (b, h) in tj.iter().enumerate() {
                    let piece = p[i][a].intersect(&q[j][b].translate(&g.inv()))?;
                    let label = g.mul(h);
                    let merged = match by_label.remove(&label) {
                        Some(prev) => prev.union(&piece)?,
                        None => piece,
                    };
                    by_label.insert(label, merged);
                }
            }
            let (labels, row): (Vec<Word>, Vec<Piece>) = by_label.into_iter().map(|(l, r)| (l, Piece::Symbolic(r))).unzip();
            sets.push(labels);
            pieces.push(row);
        }
    }
    Decomposition::new(d.alphabet.clone(), sets, pieces)
}

/// Subgroup-rank evidence for the lower bounds on translating sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OzawaReport {
    /// Rank of the subgroup generated by all translating elements.
    pub union_rank: usize,
    /// A free group is non-amenable exactly when its rank is at least 2.
    pub union_non_amenable: bool,
    pub set_ranks: Vec<usize>,
    /// `⟨S_i⟩` is infinite exactly when it is nontrivial.
    pub set_infinite: Vec<bool>,
}

pub fn ozawa_lower_bounds(d: &Decomposition) -> OzawaReport {
    let rank = d.alphabet.rank();
    let all: Vec<Word> = d.sets.iter().flatten().cloned().collect();
    let union_rank = SubgroupGraph::stallings_fold(rank, &all).rank();
    let set_ranks: Vec<usize> = d.sets.iter().map(|s| SubgroupGraph::stallings_fold(rank, s).rank()).collect();
    OzawaReport {
        union_rank,
        union_non_amenable: union_rank >= 2,
        set_infinite: set_ranks.iter().map(|&r| r > 0).collect(),
        set_ranks,
    }
}

/// Lower bound on the Tarski number when all `m`-generated subgroups are amenable.
pub fn amenable_subgroups_bound(m: u64) -> u64 {
    m + 3
}

/// Lower bound on the Tarski number when all `m`-generated subgroups are finite.
pub fn finite_subgroups_bound(m: u64) -> u64 {
    2 * m + 4
}
