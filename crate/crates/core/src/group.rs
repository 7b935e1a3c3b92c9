//! Groups with a solvable word problem, behind a common trait.
//!
//! Elements are always carried as [`Word`]s in a canonical normal form, so
//! equality of normal forms is equality in the group. Group families are
//! registered by name and resolved at runtime from descriptors such as
//! `free:2`, `F3`, `abelian:2` or `Z2`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::word::{Alphabet, Letter, Word};

/// A finitely generated group whose elements have computable normal forms.
pub trait Group: Send + Sync + fmt::Debug {
    /// Descriptor that round-trips through [`GroupRegistry::parse`].
    fn descriptor(&self) -> String;

    fn alphabet(&self) -> &Alphabet;

    /// Canonical representative of the element spelled by `w`.
    fn normal_form(&self, w: &Word) -> Word;

    fn is_abelian(&self) -> bool;

    fn rank(&self) -> usize {
        self.alphabet().rank()
    }

    fn mul(&self, u: &Word, v: &Word) -> Word {
        self.normal_form(&u.mul(v))
    }

    fn inv(&self, u: &Word) -> Word {
        self.normal_form(&u.inv())
    }

    fn is_identity(&self, w: &Word) -> bool {
        self.normal_form(w).is_identity()
    }

    fn generators(&self) -> Vec<Word> {
        (0..self.rank() as u16).map(Word::gen).collect()
    }
}

/// The free group on an alphabet. Reduced words are already normal forms.
#[derive(Clone, Debug)]
pub struct FreeGroup {
    alphabet: Alphabet,
}

impl FreeGroup {
    pub fn new(alphabet: Alphabet) -> Self {
        FreeGroup { alphabet }
    }

    pub fn of_rank(rank: usize) -> Self {
        FreeGroup { alphabet: Alphabet::standard(rank) }
    }
}

impl Group for FreeGroup {
    fn descriptor(&self) -> String {
        format!("free:{}", self.rank())
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn normal_form(&self, w: &Word) -> Word {
        w.clone()
    }

    fn is_abelian(&self) -> bool {
        self.rank() == 1
    }
}

/// Coordinates of an element of `Z^rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianVector(pub Vec<i64>);

impl AbelianVector {
    pub fn zero(rank: usize) -> Self {
        AbelianVector(vec![0; rank])
    }

    pub fn of_word(w: &Word, rank: usize) -> Self {
        AbelianVector(w.abelianization(rank))
    }

    pub fn add(&self, other: &AbelianVector) -> AbelianVector {
        AbelianVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// The word `x1^c1 · x2^c2 ⋯`.
    pub fn to_word(&self) -> Word {
        let mut letters = Vec::new();
        for (i, &c) in self.0.iter().enumerate() {
            let l = Letter::new(i as u16, c < 0);
            letters.extend(std::iter::repeat_n(l, c.unsigned_abs() as usize));
        }
        Word::from_reduced(letters)
    }
}

/// The free abelian group `Z^rank`, with normal forms `x1^c1 · x2^c2 ⋯`.
#[derive(Clone, Debug)]
pub struct FreeAbelianGroup {
    alphabet: Alphabet,
}

impl FreeAbelianGroup {
    pub fn new(alphabet: Alphabet) -> Self {
        FreeAbelianGroup { alphabet }
    }

    pub fn of_rank(rank: usize) -> Self {
        let alphabet = match rank {
            1 => Alphabet::new(["t"]).expect("valid"),
            2 => Alphabet::new(["x", "y"]).expect("valid"),
            3 => Alphabet::new(["x", "y", "z"]).expect("valid"),
            _ => Alphabet::indexed("x", rank),
        };
        FreeAbelianGroup { alphabet }
    }

    pub fn vector(&self, w: &Word) -> AbelianVector {
        AbelianVector::of_word(w, self.rank())
    }
}

impl Group for FreeAbelianGroup {
    fn descriptor(&self) -> String {
        format!("abelian:{}", self.rank())
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn normal_form(&self, w: &Word) -> Word {
        self.vector(w).to_word()
    }

    fn is_abelian(&self) -> bool {
        true
    }
}

/// A named family of groups indexed by rank.
pub trait GroupFamily: Send + Sync {
    fn name(&self) -> &'static str;
    /// Short spellings accepted as `<alias><rank>`, e.g. `F` in `F2`.
    fn alias(&self) -> &'static str;
    fn build(&self, rank: usize, names: Option<Alphabet>) -> Result<Arc<dyn Group>>;
}

struct FreeFamily;

impl GroupFamily for FreeFamily {
    fn name(&self) -> &'static str {
        "free"
    }
    fn alias(&self) -> &'static str {
        "F"
    }
    fn build(&self, rank: usize, names: Option<Alphabet>) -> Result<Arc<dyn Group>> {
        let alphabet = names.unwrap_or_else(|| Alphabet::standard(rank));
        Ok(Arc::new(FreeGroup::new(alphabet)))
    }
}

struct AbelianFamily;

impl GroupFamily for AbelianFamily {
    fn name(&self) -> &'static str {
        "abelian"
    }
    fn alias(&self) -> &'static str {
        "Z"
    }
    fn build(&self, rank: usize, names: Option<Alphabet>) -> Result<Arc<dyn Group>> {
        Ok(Arc::new(match names {
            Some(a) => FreeAbelianGroup::new(a),
            None => FreeAbelianGroup::of_rank(rank),
        }))
    }
}

/// Name-indexed registry of group families.
pub struct GroupRegistry {
    families: BTreeMap<&'static str, Box<dyn GroupFamily>>,
}

impl Default for GroupRegistry {
    fn default() -> Self {
        let mut r = GroupRegistry { families: BTreeMap::new() };
        r.register(Box::new(FreeFamily));
        r.register(Box::new(AbelianFamily));
        r
    }
}

impl GroupRegistry {
    pub fn register(&mut self, family: Box<dyn GroupFamily>) {
        self.families.insert(family.name(), family);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.families.keys().copied().collect()
    }

    /// Resolves `free:2`, `abelian:3`, `F2`, `Z2` or `Z` (rank 1).
    pub fn parse(&self, descriptor: &str) -> Result<Arc<dyn Group>> {
        self.parse_with_names(descriptor, None)
    }

    pub fn parse_with_names(&self, descriptor: &str, names: Option<Alphabet>) -> Result<Arc<dyn Group>> {
        let unknown = || Error::Unknown { kind: "group", name: descriptor.to_string() };
        let (family, rank) = if let Some((fam, rank)) = descriptor.split_once(':') {
            let family = self.families.get(fam).ok_or_else(unknown)?;
            (family, rank.parse::<usize>().map_err(|_| unknown())?)
        } else {
            let family = self.families.values().find(|f| descriptor.starts_with(f.alias())).ok_or_else(unknown)?;
            let rest = &descriptor[family.alias().len()..];
            let rank = if rest.is_empty() { 1 } else { rest.parse::<usize>().map_err(|_| unknown())? };
            (family, rank)
        };
        if rank == 0 {
            return Err(Error::InvalidAlphabet("rank must be ≥ 1".into()));
        }
        if let Some(n) = &names {
            if n.rank() != rank {
                return Err(Error::AlphabetMismatch(format!("{} names for rank {rank}", n.rank())));
            }
        }
        family.build(rank, names)
    }
}

/// A vertex of a Cayley ball together with its distance from the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallVertex {
    pub element: Word,
    pub dist: usize,
}

/// The ball of radius `radius` around the identity in the word metric of
/// `gens ∪ gens⁻¹`, as normal forms sorted by (distance, shortlex).
pub fn cayley_ball(group: &dyn Group, gens: &[Word], radius: usize) -> Vec<BallVertex> {
    let mut steps: Vec<Word> = Vec::new();
    for g in gens {
        for s in [group.normal_form(g), group.inv(g)] {
            if !s.is_identity() && !steps.contains(&s) {
                steps.push(s);
            }
        }
    }
    let mut dist: HashMap<Word, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(Word::identity(), 0);
    queue.push_back(Word::identity());
    while let Some(g) = queue.pop_front() {
        let d = dist[&g];
        if d == radius {
            continue;
        }
        for s in &steps {
            let h = group.mul(&g, s);
            if !dist.contains_key(&h) {
                dist.insert(h.clone(), d + 1);
                queue.push_back(h);
            }
        }
    }
    let mut out: Vec<BallVertex> = dist.into_iter().map(|(element, dist)| BallVertex { element, dist }).collect();
    out.sort_by(|a, b| a.dist.cmp(&b.dist).then_with(|| a.element.cmp(&b.element)));
    out
}
