//! Freely reduced words over a signed generator alphabet.
//!
//! A [`Word`] never stores an adjacent cancelling pair, so two words are equal
//! as free-group elements iff they are equal as values. Words are ordered
//! shortlex, with letters ordered `x1 < x1⁻¹ < x2 < x2⁻¹ < …`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A generator or its inverse. `gen` is zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u16,
    pub inv: bool,
}

impl Letter {
    pub const fn new(gen: u16, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub const fn pos(gen: u16) -> Self {
        Letter { gen, inv: false }
    }

    pub const fn neg(gen: u16) -> Self {
        Letter { gen, inv: true }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// Dense symbol index `2·gen + inv`; matches the letter order.
    pub fn symbol(self) -> usize {
        2 * self.gen as usize + self.inv as usize
    }

    pub fn from_symbol(sym: usize) -> Self {
        Letter { gen: (sym / 2) as u16, inv: sym % 2 == 1 }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }

    /// +1 or -1.
    pub fn sign(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn gen(gen: u16) -> Self {
        Word { letters: vec![Letter::pos(gen)] }
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut letters: Vec<Letter> = Vec::new();
        for l in raw {
            match letters.last() {
                Some(&last) if last.cancels(l) => {
                    letters.pop();
                }
                _ => letters.push(l),
            }
        }
        Word { letters }
    }

    /// Builds a word from letters already known to be reduced.
    ///
    /// Panics in debug builds if the sequence is not reduced.
    pub fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| !w[0].cancels(w[1])));
        Word { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn mul(&self, other: &Word) -> Word {
        // Only the junction can cancel.
        let mut k = 0;
        let n = self.letters.len();
        while k < n.min(other.len()) && self.letters[n - 1 - k].cancels(other.letters[k]) {
            k += 1;
        }
        let mut letters = Vec::with_capacity(n - k + other.len() - k);
        letters.extend_from_slice(&self.letters[..n - k]);
        letters.extend_from_slice(&other.letters[k..]);
        Word { letters }
    }

    pub fn inv(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn pow(&self, exp: i64) -> Word {
        let base = if exp < 0 { self.inv() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..exp.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Conjugate `g⁻¹·self·g`.
    pub fn conj(&self, g: &Word) -> Word {
        g.inv().mul(self).mul(g)
    }

    /// Commutator `u·v·u⁻¹·v⁻¹`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.mul(v).mul(&u.inv()).mul(&v.inv())
    }

    /// Left-normed commutator `[w₁, w₂, …, w_k]`.
    pub fn commutator_left_normed(parts: &[Word]) -> Word {
        let mut iter = parts.iter();
        let mut acc = iter.next().cloned().unwrap_or_default();
        for w in iter {
            acc = Word::commutator(&acc, w);
        }
        acc
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || !l.cancels(f),
            _ => true,
        }
    }

    /// Returns `(core, conjugator)` with `self = conjugator⁻¹·core·conjugator`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k].cancels(self.letters[n - 1 - k]) {
            k += 1;
        }
        let core = Word { letters: self.letters[k..n - k].to_vec() };
        // self = prefix·core·prefix⁻¹, so the conjugator is prefix⁻¹.
        let conjugator = Word { letters: self.letters[..k].to_vec() }.inv();
        (core, conjugator)
    }

    /// Exponent sum of every generator, i.e. the image in `Z^rank`.
    pub fn abelianization(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0; rank];
        for l in &self.letters {
            v[l.gen as usize] += l.sign();
        }
        v
    }

    /// Largest generator index used plus one.
    pub fn min_rank(&self) -> usize {
        self.letters.iter().map(|l| l.gen as usize + 1).max().unwrap_or(0)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word { letters: self.letters[..len].to_vec() }
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word { letters: self.letters[start..].to_vec() }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "g{}{}", l.gen + 1, if l.inv { "⁻¹" } else { "" })?;
        }
        Ok(())
    }
}

/// The generating set of a free group: a list of distinct names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet must have rank ≥ 1".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.chars().any(|c| c.is_whitespace() || "·*^⁻¹()".contains(c)) {
                return Err(Error::InvalidAlphabet(format!("bad generator name {n:?}")));
            }
            if n == "1" {
                return Err(Error::InvalidAlphabet("\"1\" is reserved for the identity".into()));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidAlphabet(format!("duplicate generator name {n:?}")));
            }
        }
        Ok(Alphabet { names })
    }

    /// `a, b, c, …` for rank ≤ 26, otherwise `x1, x2, …`.
    pub fn standard(rank: usize) -> Self {
        if rank <= 26 {
            let names = (0..rank).map(|i| ((b'a' + i as u8) as char).to_string());
            Alphabet::new(names).expect("standard names are valid")
        } else {
            Alphabet::indexed("x", rank)
        }
    }

    /// `prefix1, prefix2, …`.
    pub fn indexed(prefix: &str, rank: usize) -> Self {
        Alphabet::new((1..=rank).map(|i| format!("{prefix}{i}"))).expect("indexed names are valid")
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbols(&self) -> usize {
        2 * self.rank()
    }

    pub fn gen(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    /// Builds a word from signed one-based generator indices (`-2` is `x2⁻¹`).
    pub fn word(&self, raw: &[i32]) -> Result<Word> {
        let mut letters = Vec::with_capacity(raw.len());
        for &r in raw {
            let idx = r.unsigned_abs() as usize;
            if r == 0 || idx > self.rank() {
                return Err(Error::InvalidGenerator { index: r as i64, rank: self.rank() });
            }
            letters.push(Letter::new((idx - 1) as u16, r < 0));
        }
        Ok(Word::reduce(letters))
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|l| l.gen as usize >= self.rank()) {
            Some(l) => Err(Error::InvalidGenerator { index: l.gen as i64 + 1, rank: self.rank() }),
            None => Ok(()),
        }
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let name = &self.names[l.gen as usize];
        if l.inv {
            format!("{name}⁻¹")
        } else {
            name.clone()
        }
    }

    /// `a·b⁻¹`, or `1` for the identity.
    pub fn format(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.letters().iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join("·")
    }

    pub fn format_all<'a>(&self, ws: impl IntoIterator<Item = &'a Word>) -> Vec<String> {
        ws.into_iter().map(|w| self.format(w)).collect()
    }

    /// Parses `a·b⁻¹·a`, `a*b^-1*a`, `a b^-1 a` or `a^3·b`; `1` is the identity.
    pub fn parse(&self, s: &str) -> Result<Word> {
        let bad = |msg: &str| Error::Parse(format!("{msg} in word {s:?}"));
        let mut letters = Vec::new();
        for token in s.split(|c: char| c == '·' || c == '*' || c == '.' || c.is_whitespace()) {
            if token.is_empty() || token == "1" {
                continue;
            }
            let (name, exp) = if let Some(name) = token.strip_suffix("⁻¹") {
                (name, -1i64)
            } else if let Some((name, e)) = token.split_once('^') {
                let e: i64 = e.parse().map_err(|_| bad("bad exponent"))?;
                (name, e)
            } else {
                (token, 1)
            };
            let gen = self.gen(name).ok_or_else(|| bad(&format!("unknown generator {name:?}")))?;
            let l = Letter::new(gen, exp < 0);
            for _ in 0..exp.unsigned_abs() {
                letters.push(l);
            }
        }
        Ok(Word::reduce(letters))
    }

    pub fn parse_all<S: AsRef<str>>(&self, items: &[S]) -> Result<Vec<Word>> {
        items.iter().map(|s| self.parse(s.as_ref())).collect()
    }

    /// All reduced words of length exactly `len`, in shortlex order.
    pub fn words_of_length(&self, len: usize) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * (2 * self.rank()).max(1));
            for w in &out {
                for sym in 0..self.symbols() {
                    let l = Letter::from_symbol(sym);
                    if w.last().is_some_and(|last| last.cancels(l)) {
                        continue;
                    }
                    let mut letters = w.letters().to_vec();
                    letters.push(l);
                    next.push(Word::from_reduced(letters));
                }
            }
            out = next;
        }
        out
    }

    /// All reduced words of length ≤ `radius`, in shortlex order.
    pub fn ball(&self, radius: usize) -> Vec<Word> {
        (0..=radius).flat_map(|n| self.words_of_length(n)).collect()
    }
}
