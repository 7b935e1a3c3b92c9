//! Regular subsets of a free group, as minimal automata over reduced words.
//!
//! Every [`RegSet`] is kept complete, minimal and canonically numbered
//! (breadth-first from the initial state, symbols in letter order), so set
//! equality is structural equality. Only freely reduced words are ever
//! accepted.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Alphabet, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegSet {
    rank: usize,
    /// `trans[state][symbol]`; state 0 is initial.
    trans: Vec<Vec<usize>>,
    accept: Vec<bool>,
}

/// Serialized automaton. Missing transitions go to an implicit reject state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegSetJson {
    pub states: usize,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: usize,
    pub letter: String,
    pub to: usize,
}

/// A complete DFA that is not yet restricted or minimized.
struct RawDfa {
    symbols: usize,
    trans: Vec<Vec<usize>>,
    accept: Vec<bool>,
}

impl RawDfa {
    /// Minimizes by partition refinement and renumbers canonically.
    fn minimize(self, rank: usize) -> RegSet {
        let n = self.trans.len();
        // Drop unreachable states first.
        let mut reach = vec![false; n];
        let mut stack = vec![0];
        reach[0] = true;
        while let Some(q) = stack.pop() {
            for &t in &self.trans[q] {
                if !reach[t] {
                    reach[t] = true;
                    stack.push(t);
                }
            }
        }
        let mut class: Vec<usize> = (0..n).map(|q| self.accept[q] as usize).collect();
        let mut count = 0;
        loop {
            let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![0; n];
            for q in (0..n).filter(|&q| reach[q]) {
                let sig = (class[q], self.trans[q].iter().map(|&t| class[t]).collect::<Vec<_>>());
                let len = sigs.len();
                next[q] = *sigs.entry(sig).or_insert(len);
            }
            let new_count = sigs.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // Canonical BFS numbering over classes.
        let mut rep = vec![usize::MAX; count];
        for q in (0..n).filter(|&q| reach[q]) {
            if rep[class[q]] == usize::MAX {
                rep[class[q]] = q;
            }
        }
        let mut order = vec![usize::MAX; count];
        let mut seq = Vec::with_capacity(count);
        order[class[0]] = 0;
        seq.push(class[0]);
        let mut i = 0;
        while i < seq.len() {
            let c = seq[i];
            i += 1;
            for s in 0..self.symbols {
                let t = class[self.trans[rep[c]][s]];
                if order[t] == usize::MAX {
                    order[t] = seq.len();
                    seq.push(t);
                }
            }
        }
        let trans = seq.iter().map(|&c| (0..self.symbols).map(|s| order[class[self.trans[rep[c]][s]]]).collect()).collect();
        let accept = seq.iter().map(|&c| self.accept[rep[c]]).collect();
        RegSet { rank, trans, accept }
    }
}

/// Generic reachable-pair product of two complete DFAs.
fn product(a: &RegSet, b: &RegSet, keep: impl Fn(bool, bool) -> bool) -> RawDfa {
    let symbols = 2 * a.rank;
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = vec![(0, 0)];
    index.insert((0, 0), 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        i += 1;
        let row = (0..symbols)
            .map(|s| {
                let t = (a.trans[p][s], b.trans[q][s]);
                let len = pairs.len();
                *index.entry(t).or_insert_with(|| {
                    pairs.push(t);
                    len
                })
            })
            .collect();
        trans.push(row);
    }
    let accept = pairs.iter().map(|&(p, q)| keep(a.accept[p], b.accept[q])).collect();
    RawDfa { symbols, trans, accept }
}

impl RegSet {
    /// The automaton of all reduced words: state = last letter read.
    fn reduced_raw(rank: usize, accept_all: bool) -> RawDfa {
        let symbols = 2 * rank;
        // 0: start, 1 + s: last symbol s, symbols + 1: sink
        let sink = symbols + 1;
        let mut trans = Vec::with_capacity(symbols + 2);
        for state in 0..symbols + 2 {
            let row = (0..symbols)
                .map(|t| {
                    if state == sink {
                        return sink;
                    }
                    if state > 0 && Letter::from_symbol(state - 1).cancels(Letter::from_symbol(t)) {
                        return sink;
                    }
                    1 + t
                })
                .collect();
            trans.push(row);
        }
        let accept = (0..symbols + 2).map(|q| accept_all && q != sink).collect();
        RawDfa { symbols, trans, accept }
    }

    /// Every reduced word: the whole group.
    pub fn all(rank: usize) -> Self {
        RegSet::reduced_raw(rank, true).minimize(rank)
    }

    pub fn empty(rank: usize) -> Self {
        RegSet::reduced_raw(rank, false).minimize(rank)
    }

    /// Reduced words whose last letter is `l`, written `L(l)`.
    pub fn ending_in(rank: usize, l: Letter) -> Self {
        let mut raw = RegSet::reduced_raw(rank, false);
        raw.accept[1 + l.symbol()] = true;
        raw.minimize(rank)
    }

    /// Reduced words whose first letter is `l`.
    pub fn starting_with(rank: usize, l: Letter) -> Self {
        let symbols = 2 * rank;
        // 0 start, 1 accepted-prefix, 2 sink
        let trans = vec![(0..symbols).map(|s| if s == l.symbol() { 1 } else { 2 }).collect(), vec![1; symbols], vec![2; symbols]];
        let raw = RawDfa { symbols, trans, accept: vec![false, true, false] };
        raw.minimize(rank).restrict()
    }

    /// A finite set of words.
    pub fn finite(rank: usize, words: &[Word]) -> Self {
        let symbols = 2 * rank;
        let mut trans: Vec<Vec<usize>> = vec![vec![1; symbols], vec![1; symbols]];
        let mut accept = vec![false, false];
        for w in words {
            let mut q = 0;
            for &l in w.letters() {
                let s = l.symbol();
                if trans[q][s] == 1 {
                    trans.push(vec![1; symbols]);
                    accept.push(false);
                    let new = trans.len() - 1;
                    trans[q][s] = new;
                }
                q = trans[q][s];
            }
            accept[q] = true;
        }
        RawDfa { symbols, trans, accept }.minimize(rank).restrict()
    }

    /// Intersects with the reduced-word language and minimizes.
    fn restrict(self) -> Self {
        let reduced = RegSet::all(self.rank);
        product(&self, &reduced, |a, b| a && b).minimize(self.rank)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    fn check_rank(&self, other: &RegSet) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::AlphabetMismatch(format!("rank {} vs rank {}", self.rank, other.rank)));
        }
        Ok(())
    }

    pub fn union(&self, other: &RegSet) -> Result<RegSet> {
        self.check_rank(other)?;
        Ok(product(self, other, |a, b| a || b).minimize(self.rank))
    }

    pub fn intersect(&self, other: &RegSet) -> Result<RegSet> {
        self.check_rank(other)?;
        Ok(product(self, other, |a, b| a && b).minimize(self.rank))
    }

    pub fn difference(&self, other: &RegSet) -> Result<RegSet> {
        self.check_rank(other)?;
        Ok(product(self, other, |a, b| a && !b).minimize(self.rank))
    }

    /// Complement within the reduced words.
    pub fn complement(&self) -> RegSet {
        RegSet::all(self.rank).difference(self).expect("same rank")
    }

    pub fn is_empty(&self) -> bool {
        !self.accept.iter().any(|&a| a)
    }

    pub fn equals(&self, other: &RegSet) -> Result<bool> {
        self.check_rank(other)?;
        Ok(self == other)
    }

    pub fn is_subset(&self, other: &RegSet) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    fn run(&self, mut q: usize, letters: &[Letter]) -> usize {
        for &l in letters {
            q = self.trans[q][l.symbol()];
        }
        q
    }

    pub fn member(&self, w: &Word) -> bool {
        if w.min_rank() > self.rank {
            return false;
        }
        self.accept[self.run(0, w.letters())]
    }

    /// `{reduce(w·g) : w ∈ self}`.
    ///
    /// Reads `h` while holding its last `|g|` letters in a buffer; a word is
    /// accepted when `prefix · reduce(buffer · g⁻¹)` is accepted by `self`.
    /// With a full buffer no cancellation reaches the prefix.
    pub fn translate(&self, g: &Word) -> RegSet {
        let m = g.len();
        if m == 0 {
            return self.clone();
        }
        let ginv = g.inv();
        let symbols = 2 * self.rank;
        type Key = (usize, Vec<Letter>);
        let mut index: HashMap<Key, usize> = HashMap::new();
        let mut keys: Vec<Option<Key>> = Vec::new();
        // state 0: sink for non-reduced input
        keys.push(None);
        let start: Key = (0, Vec::new());
        index.insert(start.clone(), 1);
        keys.push(Some(start));
        let mut trans: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < keys.len() {
            let row = match keys[i].clone() {
                None => vec![0; symbols],
                Some((q, buf)) => (0..symbols)
                    .map(|s| {
                        let l = Letter::from_symbol(s);
                        if buf.last().is_some_and(|b| b.cancels(l)) {
                            return 0;
                        }
                        let mut nb = buf.clone();
                        nb.push(l);
                        let mut nq = q;
                        if nb.len() > m {
                            nq = self.trans[q][nb[0].symbol()];
                            nb.remove(0);
                        }
                        let key = (nq, nb);
                        let len = keys.len();
                        *index.entry(key.clone()).or_insert_with(|| {
                            keys.push(Some(key));
                            len
                        })
                    })
                    .collect(),
            };
            trans.push(row);
            i += 1;
        }
        let accept = keys
            .iter()
            .map(|k| match k {
                None => false,
                Some((q, buf)) => {
                    let tail = Word::reduce(buf.iter().copied()).mul(&ginv);
                    self.accept[self.run(*q, tail.letters())]
                }
            })
            .collect();
        // Start state must be index 0 for minimize; swap sink and start.
        let swap = |x: usize| match x {
            0 => 1,
            1 => 0,
            x => x,
        };
        let mut trans: Vec<Vec<usize>> = trans.into_iter().map(|row| row.into_iter().map(swap).collect()).collect();
        let mut accept: Vec<bool> = accept;
        trans.swap(0, 1);
        accept.swap(0, 1);
        RawDfa { symbols, trans, accept }.minimize(self.rank)
    }

    /// For each state, the length of the shortest accepted continuation.
    fn dist_to_accept(&self) -> Vec<Option<usize>> {
        let n = self.trans.len();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (q, row) in self.trans.iter().enumerate() {
            for &t in row {
                rev[t].push(q);
            }
        }
        let mut dist = vec![None; n];
        let mut queue = VecDeque::new();
        for (q, d) in dist.iter_mut().enumerate() {
            if self.accept[q] {
                *d = Some(0);
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            let d = dist[q].expect("set");
            for &p in &rev[q] {
                if dist[p].is_none() {
                    dist[p] = Some(d + 1);
                    queue.push_back(p);
                }
            }
        }
        dist
    }

    /// The shortlex-least accepted word.
    pub fn shortest_member(&self) -> Option<Word> {
        let dist = self.dist_to_accept();
        let mut remaining = dist[0]?;
        let mut q = 0;
        let mut letters = Vec::with_capacity(remaining);
        while remaining > 0 {
            let s = (0..2 * self.rank)
                .find(|&s| dist[self.trans[q][s]] == Some(remaining - 1))
                .expect("a successor is one step closer");
            letters.push(Letter::from_symbol(s));
            q = self.trans[q][s];
            remaining -= 1;
        }
        Some(Word::from_reduced(letters))
    }

    /// Accepted words of length ≤ `maxlen`, shortlex order.
    pub fn enumerate(&self, maxlen: usize) -> Vec<Word> {
        let dist = self.dist_to_accept();
        let mut out = Vec::new();
        for len in 0..=maxlen {
            let mut stack: Vec<Letter> = Vec::with_capacity(len);
            self.enumerate_exact(0, len, &dist, &mut stack, &mut out);
        }
        out
    }

    fn enumerate_exact(&self, q: usize, left: usize, dist: &[Option<usize>], stack: &mut Vec<Letter>, out: &mut Vec<Word>) {
        match dist[q] {
            Some(d) if d <= left => {}
            _ => return,
        }
        if left == 0 {
            if self.accept[q] {
                out.push(Word::from_reduced(stack.clone()));
            }
            return;
        }
        for s in 0..2 * self.rank {
            stack.push(Letter::from_symbol(s));
            self.enumerate_exact(self.trans[q][s], left - 1, dist, stack, out);
            stack.pop();
        }
    }

    /// States from which some word is accepted.
    fn live(&self) -> Vec<bool> {
        self.dist_to_accept().into_iter().map(|d| d.is_some()).collect()
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> RegSetJson {
        let live = self.live();
        let mut ids = vec![usize::MAX; self.trans.len()];
        let mut next = 0;
        for q in 0..self.trans.len() {
            if live[q] || q == 0 {
                ids[q] = next;
                next += 1;
            }
        }
        let mut transitions = Vec::new();
        for (q, row) in self.trans.iter().enumerate() {
            if ids[q] == usize::MAX {
                continue;
            }
            for (s, &t) in row.iter().enumerate() {
                if live[t] {
                    transitions.push(TransitionJson {
                        from: ids[q],
                        letter: alphabet.letter_name(Letter::from_symbol(s)),
                        to: ids[t],
                    });
                }
            }
        }
        RegSetJson {
            states: next,
            initial: 0,
            accepting: (0..self.trans.len()).filter(|&q| self.accept[q]).map(|q| ids[q]).collect(),
            transitions,
        }
    }

    /// Loads a (possibly partial) deterministic automaton. Non-reduced words
    /// it might accept are discarded.
    pub fn from_json(json: &RegSetJson, alphabet: &Alphabet) -> Result<RegSet> {
        let rank = alphabet.rank();
        let symbols = 2 * rank;
        let n = json.states;
        if json.initial >= n.max(1) && n > 0 {
            return Err(Error::Parse(format!("initial state {} out of range", json.initial)));
        }
        let sink = n;
        let mut trans = vec![vec![usize::MAX; symbols]; n + 1];
        trans[sink] = vec![sink; symbols];
        for t in &json.transitions {
            if t.from >= n || t.to >= n {
                return Err(Error::Parse(format!("transition {}→{} out of range", t.from, t.to)));
            }
            let w = alphabet.parse(&t.letter)?;
            if w.len() != 1 {
                return Err(Error::Parse(format!("transition label {:?} is not a letter", t.letter)));
            }
            let s = w.letters()[0].symbol();
            if trans[t.from][s] != usize::MAX && trans[t.from][s] != t.to {
                return Err(Error::Parse(format!("nondeterministic transition from {} on {}", t.from, t.letter)));
            }
            trans[t.from][s] = t.to;
        }
        for row in trans.iter_mut() {
            for t in row.iter_mut() {
                if *t == usize::MAX {
                    *t = sink;
                }
            }
        }
        let mut accept = vec![false; n + 1];
        for &q in &json.accepting {
            if q >= n {
                return Err(Error::Parse(format!("accepting state {q} out of range")));
            }
            accept[q] = true;
        }
        if n == 0 {
            return Ok(RegSet::empty(rank));
        }
        // move the initial state to index 0
        let init = json.initial;
        let swap = |x: usize| {
            if x == 0 {
                init
            } else if x == init {
                0
            } else {
                x
            }
        };
        let mut trans: Vec<Vec<usize>> = trans.into_iter().map(|row| row.into_iter().map(swap).collect()).collect();
        trans.swap(0, init);
        accept.swap(0, init);
        Ok(RawDfa { symbols, trans, accept }.minimize(rank).restrict())
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let json = self.to_json(alphabet);
        let mut s = String::from("digraph regset {\n  rankdir=LR;\n  start [shape=point];\n  start -> 0;\n");
        for q in 0..json.states {
            let shape = if json.accepting.contains(&q) { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  {q} [shape={shape}];");
        }
        for t in &json.transitions {
            let _ = writeln!(s, "  {} -> {} [label=\"{}\"];", t.from, t.to, t.letter);
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const A: Letter = Letter::pos(0);
    const AI: Letter = Letter::neg(0);
    const B: Letter = Letter::pos(1);
    const BI: Letter = Letter::neg(1);

    fn f2() -> Alphabet {
        Alphabet::standard(2)
    }

    /// Oracle: the set of reduced words of length ≤ n satisfying a predicate.
    fn listed(n: usize, pred: impl Fn(&Word) -> bool) -> Vec<Word> {
        f2().ball(n).into_iter().filter(|w| pred(w)).collect()
    }

    fn random_regset(rng: &mut ChaCha8Rng) -> RegSet {
        let letters = [A, AI, B, BI];
        let mut s = RegSet::empty(2);
        for _ in 0..rng.random_range(1..4) {
            let piece = match rng.random_range(0..3) {
                0 => RegSet::ending_in(2, letters[rng.random_range(0..4)]),
                1 => RegSet::starting_with(2, letters[rng.random_range(0..4)]),
                _ => {
                    let ws: Vec<Word> = (0..3).map(|_| random_word(rng, 4)).collect();
                    RegSet::finite(2, &ws)
                }
            };
            s = if rng.random_bool(0.7) { s.union(&piece).unwrap() } else { s.difference(&piece).unwrap() };
        }
        s
    }

    fn random_word(rng: &mut ChaCha8Rng, max: usize) -> Word {
        let len = rng.random_range(0..=max);
        Word::reduce((0..len).map(|_| Letter::new(rng.random_range(0..2), rng.random_bool(0.5))))
    }

    #[test]
    fn boolean_examples() {
        assert!(RegSet::all(2).complement().is_empty());
        assert!(RegSet::ending_in(2, A).intersect(&RegSet::ending_in(2, B)).unwrap().is_empty());
        let mut u = RegSet::finite(2, &[Word::identity()]);
        for l in [A, AI, B, BI] {
            u = u.union(&RegSet::ending_in(2, l)).unwrap();
        }
        assert!(u.equals(&RegSet::all(2)).unwrap());
        assert_eq!(u.enumerate(5), f2().ball(5));
    }

    #[test]
    fn rank_mismatch_is_error() {
        assert!(matches!(RegSet::all(2).union(&RegSet::all(3)), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn enumerate_examples() {
        let a = f2();
        assert!(RegSet::empty(2).enumerate(4).is_empty());
        assert_eq!(a.format_all(&RegSet::ending_in(2, A).enumerate(2)), vec!["a", "a·a", "b·a", "b⁻¹·a"]);
        assert_eq!(a.format_all(&RegSet::all(2).enumerate(1)), vec!["1", "a", "a⁻¹", "b", "b⁻¹"]);
    }

    #[test]
    fn translate_examples() {
        let la = RegSet::ending_in(2, A);
        assert_eq!(la.translate(&Word::identity()), la);
        let t = la.translate(&Word::letter(AI));
        let expected = listed(4, |w| w.last() != Some(AI));
        assert_eq!(t.enumerate(4), expected);
        let oracle: Vec<Word> = {
            let mut v: Vec<Word> = la.enumerate(5).iter().map(|w| w.mul(&Word::letter(AI))).filter(|w| w.len() <= 4).collect();
            v.sort();
            v.dedup();
            v
        };
        assert_eq!(oracle, expected);
        assert!(t.member(&Word::identity()));
    }

    #[test]
    fn translate_round_trip_and_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let p = random_regset(&mut rng);
            let g = random_word(&mut rng, 3);
            let h = random_word(&mut rng, 6);
            let t = p.translate(&g);
            assert_eq!(t.member(&h), p.member(&h.mul(&g.inv())));
            if rng.random_bool(0.1) {
                assert_eq!(t.translate(&g.inv()), p);
            }
        }
    }

    #[test]
    fn translate_bounded_cancellation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = random_regset(&mut rng);
            let g = random_word(&mut rng, 3);
            for w in p.enumerate(6) {
                if w.len() > g.len() {
                    let k = w.len() - g.len();
                    assert_eq!(w.mul(&g).prefix(k), w.prefix(k));
                }
            }
        }
    }

    #[test]
    fn de_morgan_and_boolean_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (x, y, z) = (random_regset(&mut rng), random_regset(&mut rng), random_regset(&mut rng));
            assert_eq!(x.union(&y).unwrap().complement(), x.complement().intersect(&y.complement()).unwrap());
            assert_eq!(x.intersect(&y).unwrap().complement(), x.complement().union(&y.complement()).unwrap());
            assert_eq!(
                x.intersect(&y.union(&z).unwrap()).unwrap(),
                x.intersect(&y).unwrap().union(&x.intersect(&z).unwrap()).unwrap()
            );
            assert_eq!(x.complement().complement(), x);
            assert_eq!(x.union(&x.complement()).unwrap(), RegSet::all(2));
        }
    }

    #[test]
    fn accepted_words_are_reduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let p = random_regset(&mut rng).translate(&random_word(&mut rng, 3));
            for w in p.enumerate(8) {
                assert!(w.letters().windows(2).all(|x| !x[0].cancels(x[1])));
            }
        }
    }

    #[test]
    fn shortest_member_is_shortlex_least() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let p = random_regset(&mut rng);
            let listed = p.enumerate(6);
            match p.shortest_member() {
                Some(w) if w.len() <= 6 => assert_eq!(Some(&w), listed.first()),
                Some(_) => assert!(listed.is_empty()),
                None => assert!(p.is_empty()),
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let a = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let p = random_regset(&mut rng);
            let json = p.to_json(&a);
            let text = serde_json::to_string(&json).unwrap();
            let back: RegSetJson = serde_json::from_str(&text).unwrap();
            assert_eq!(RegSet::from_json(&back, &a).unwrap(), p);
        }
        assert!(p_dot_has_start());
    }

    fn p_dot_has_start() -> bool {
        RegSet::ending_in(2, A).to_dot(&f2()).contains("start -> 0")
    }

    #[test]
    fn from_json_drops_non_reduced_words() {
        let a = f2();
        // accepts exactly "a·a⁻¹" spelled literally, which is not reduced
        let json = RegSetJson {
            states: 3,
            initial: 0,
            accepting: vec![2],
            transitions: vec![
                TransitionJson { from: 0, letter: "a".into(), to: 1 },
                TransitionJson { from: 1, letter: "a⁻¹".into(), to: 2 },
            ],
        };
        assert!(RegSet::from_json(&json, &a).unwrap().is_empty());
    }
}
