//! Moving paradoxical decompositions to subgroups, quotients and factors.
//!
//! The central construction takes translating sets `S_i` of `G`, a right
//! transversal `T` of `H` and a finite `F ⊆ T`, and forms
//! `Φ_i = π_T(F·S_i⁻¹)` and `S'_i = Φ_i·S_i·F⁻¹ ∩ H`. When `|Φ| = |F|` the
//! sets `S'_i` translate a k-paradoxical decomposition of `H`; when
//! `|Φ| ≤ (k/2)|F|` their union does so for a 2-paradoxical one.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::decomp::Decomposition;
use crate::error::{Error, Result};
use crate::group::{AbelianVector, FreeGroup, Group};
use crate::matching::{find_even_k_subgraph, CayleyBall, MatchOutcome};
use crate::subgroup::{CosetTransversal, Subgroup, SubgroupGraph};
use crate::word::{Alphabet, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferCase {
    /// `|Φ| = |F|`: the `S'_i` carry a k-paradoxical decomposition.
    SameColors,
    /// `|Φ| ≤ (k/2)|F|`: `⋃ S'_i` carries a 2-paradoxical decomposition.
    TwoColors,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferResult {
    pub k: usize,
    pub f: Vec<Word>,
    pub phi_i: Vec<Vec<Word>>,
    pub phi: Vec<Word>,
    pub s_prime: Vec<Vec<Word>>,
    pub case: TransferCase,
    /// `Σ|S'_i|` in the first case, `2Σ|S'_i|` in the second.
    pub size_bound: usize,
    /// `Σ|S_i|` of the input decomposition.
    pub source_size: usize,
    pub ambient_rank: usize,
}

impl TransferResult {
    pub fn s_prime_total(&self) -> usize {
        self.s_prime.iter().map(Vec::len).sum()
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        let fmt_all = |v: &[Vec<Word>]| v.iter().map(|s| alphabet.format_all(s)).collect::<Vec<_>>();
        json!({
            "k": self.k,
            "F": alphabet.format_all(&self.f),
            "phi_i": fmt_all(&self.phi_i),
            "phi": alphabet.format_all(&self.phi),
            "s_prime": fmt_all(&self.s_prime),
            "case": self.case,
            "size_bound": self.size_bound,
            "s_prime_total": self.s_prime_total(),
            "source_size": self.source_size,
        })
    }
}

/// The transfer on bare translating sets.
pub fn transfer_sets(sets: &[Vec<Word>], transversal: &CosetTransversal, f: &[Word]) -> Result<TransferResult> {
    let k = sets.len();
    let ambient_rank = sets.iter().flatten().chain(f).map(Word::min_rank).max().unwrap_or(1).max(1);
    if !sets.first().is_some_and(|s| s.contains(&Word::identity())) {
        return Err(Error::InvalidArgument("the first translating set must contain 1".into()));
    }
    let f: Vec<Word> = f.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if let Some(bad) = f.iter().find(|w| !transversal.is_representative(w)) {
        return Err(Error::InvalidArgument(format!("F must lie in the transversal; {bad:?} does not")));
    }
    let h = transversal.subgroup();
    let fr = &f;
    let mut phi_i = Vec::with_capacity(k);
    let mut s_prime = Vec::with_capacity(k);
    for s in sets {
        let phi: BTreeSet<Word> = f
            .par_iter()
            .flat_map_iter(|x| s.iter().map(move |g| transversal.pi_t(&x.mul(&g.inv()))))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        let phi: Vec<Word> = phi.into_iter().collect();
        let sp: BTreeSet<Word> = phi
            .par_iter()
            .flat_map_iter(|p| {
                s.iter().flat_map(move |g| fr.iter().map(move |x| p.mul(g).mul(&x.inv()))).filter(|w| h.contains(w))
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        phi_i.push(phi);
        s_prime.push(sp.into_iter().collect::<Vec<_>>());
    }
    let phi: Vec<Word> = phi_i.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let total: usize = s_prime.iter().map(Vec::len).sum();
    let (case, size_bound) = if phi.len() == f.len() {
        (TransferCase::SameColors, total)
    } else if 2 * phi.len() <= k * f.len() {
        (TransferCase::TwoColors, 2 * total)
    } else {
        return Err(Error::TransferHypotheses { phi: phi.len(), f: f.len(), k });
    };
    Ok(TransferResult { k, f, phi_i, phi, s_prime, case, size_bound, source_size: sets.iter().map(Vec::len).sum(), ambient_rank })
}

/// Finite-index instance with the Schreier transversal of `h`; `f`
/// defaults to the whole transversal.
pub fn transfer_finite_index(d: &Decomposition, h: &SubgroupGraph, f: Option<&[Word]>) -> Result<TransferResult> {
    if h.ambient_rank() != d.alphabet().rank() {
        return Err(Error::AlphabetMismatch(format!(
            "subgroup of F_{} for a decomposition over rank {}",
            h.ambient_rank(),
            d.alphabet().rank()
        )));
    }
    let t = CosetTransversal::schreier(&Subgroup::Graph(h.clone()))?;
    let reps = t.representatives().expect("finite index").to_vec();
    let mut out = transfer_sets(d.translating_sets(), &t, f.unwrap_or(&reps))?;
    out.ambient_rank = d.alphabet().rank();
    Ok(out)
}

/// `[G:H](𝒯(G) − 2) + 2`.
pub fn finite_index_bound(index: usize, size: usize) -> usize {
    index * size.saturating_sub(2) + 2
}

/// `|T|(|S| − 1) + 1`, the size cap of `S'` when `F = T` and `1 ∈ S`.
pub fn s_prime_cap(index: usize, set_size: usize) -> usize {
    index * set_size.saturating_sub(1) + 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certification {
    pub outcome: MatchOutcome,
    pub vertices: usize,
    pub demand: usize,
    pub interior_radius: usize,
}

impl Certification {
    pub fn feasible(&self) -> bool {
        self.outcome.is_feasible()
    }
}

/// Matching on the ball of radius `r` of `Cay(H, (S'₁,…,S'_k))`, measured in
/// the word metric of `⋃ S'_i`; in the second case the union is used twice.
pub fn certify_transfer(result: &TransferResult, r: usize) -> Result<Certification> {
    if r == 0 {
        return Err(Error::RadiusTooSmall { radius: 0, needed: 1 });
    }
    let sets: Vec<Vec<Word>> = match result.case {
        TransferCase::SameColors => result.s_prime.clone(),
        TransferCase::TwoColors => {
            let union: Vec<Word> = result.s_prime.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
            vec![union.clone(), union]
        }
    };
    certify_sets(&sets, result.ambient_rank, r)
}

/// [`certify_transfer`] on explicit sets.
pub fn certify_sets(sets: &[Vec<Word>], rank: usize, r: usize) -> Result<Certification> {
    let group = FreeGroup::of_rank(rank);
    let metric: Vec<Word> =
        sets.iter().flatten().filter(|w| !w.is_identity()).cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let ball = CayleyBall::build(&group, sets, &metric, r)?;
    let demand = ball.graph.interior();
    let outcome = find_even_k_subgraph(&ball.graph, &demand);
    Ok(Certification { outcome, vertices: ball.elements.len(), demand: demand.len(), interior_radius: ball.interior_radius })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyTransfer {
    pub result: TransferResult,
    /// Side parameter of the cube `[0, M]^d`.
    pub m: usize,
    pub u: Vec<Vec<i64>>,
    /// `|F̄U|` for the chosen cube.
    pub fu: usize,
    /// `2 Σ_i 2|S_i||F|²` over the four composed colors.
    pub a_priori_bound: usize,
}

/// Transfer to the kernel of the abelianization, through the 4-colored
/// composition of `d` with itself and an explicit Følner cube.
pub fn transfer_abelian_variety(d: &Decomposition, cap: usize) -> Result<VarietyTransfer> {
    let rank = d.alphabet().rank();
    let d4 = crate::decomp::double_up(d, d)?;
    let sets = d4.translating_sets();
    let u: BTreeSet<Vec<i64>> = sets.iter().flatten().map(|s| s.inv().abelianization(rank)).collect();
    let u: Vec<Vec<i64>> = u.into_iter().collect();
    let (m, cube, fu) = (0..=cap)
        .find_map(|m| {
            let cube = lattice_cube(rank, m as i64);
            let fu: BTreeSet<Vec<i64>> = cube
                .iter()
                .flat_map(|x| u.iter().map(move |y| x.iter().zip(y).map(|(a, b)| a + b).collect::<Vec<_>>()))
                .collect();
            (fu.len() <= 2 * cube.len()).then_some((m, cube, fu.len()))
        })
        .ok_or(Error::CubeLimit(cap))?;
    let f: Vec<Word> = cube.into_iter().map(|v| AbelianVector(v).to_word()).collect();
    let t = CosetTransversal::schreier(&Subgroup::AbelianKernel { rank })?;
    let mut result = transfer_sets(sets, &t, &f)?;
    result.ambient_rank = rank;
    let a_priori_bound = 2 * sets.iter().map(|s| 2 * s.len() * f.len() * f.len()).sum::<usize>();
    Ok(VarietyTransfer { result, m, u, fu, a_priori_bound })
}

fn lattice_cube(rank: usize, m: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out.into_iter().flat_map(|v| (0..=m).map(move |c| [v.clone(), vec![c]].concat())).collect();
    }
    out
}

/// Outcome of pushing translating sets through a homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientReport {
    pub images: Vec<Vec<Word>>,
    pub image_size: usize,
    pub source_size: usize,
    pub certification: Certification,
}

/// Image of a word under the generator map `rho`.
pub fn apply_map(w: &Word, rho: &[Word], target: &dyn Group) -> Word {
    let mut out = Word::identity();
    for l in w.letters() {
        let img = &rho[l.gen as usize];
        out = out.mul(&if l.inv { img.inv() } else { img.clone() });
    }
    target.normal_form(&out)
}

/// Maps the translating sets of `d` to `target` along `rho` (one image per
/// generator) and runs matching on the ball of radius `r` of
/// `Cay(Q, (ρS₁,…,ρS_k))` in the standard word metric of `Q`.
pub fn transfer_quotient(d: &Decomposition, rho: &[Word], target: &dyn Group, r: usize) -> Result<QuotientReport> {
    if rho.len() != d.alphabet().rank() {
        return Err(Error::InvalidArgument(format!("{} generator images for rank {}", rho.len(), d.alphabet().rank())));
    }
    for img in rho {
        target.alphabet().check(img)?;
    }
    let images: Vec<Vec<Word>> = d
        .translating_sets()
        .iter()
        .map(|s| s.iter().map(|w| apply_map(w, rho, target)).collect::<BTreeSet<_>>().into_iter().collect())
        .collect();
    let ball = CayleyBall::build(target, &images, &target.generators(), r)?;
    let demand = ball.graph.interior();
    let outcome = find_even_k_subgraph(&ball.graph, &demand);
    Ok(QuotientReport {
        image_size: images.iter().map(Vec::len).sum(),
        source_size: d.tarski_size(),
        images,
        certification: Certification {
            outcome,
            vertices: ball.elements.len(),
            demand: demand.len(),
            interior_radius: ball.interior_radius,
        },
    })
}

/// Counting data for one trial `F = F₁ × F₂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductTrial {
    pub f: usize,
    pub fu: usize,
    pub f1: usize,
    pub f1u1: usize,
    pub f1u1u1: usize,
    pub f2: usize,
    pub f2u2: usize,
    pub f2u2u2: usize,
    /// `|F₁U₁|·|F₂U₂| ≥ |FU|`.
    pub product_ok: bool,
    /// `|FU| ≥ 2|F|`, the hypothesis of the dichotomy.
    pub expanding: bool,
    /// `1` if `|F₁U₁| ≥ √2|F₁|`, else `2`; `None` when not expanding.
    pub branch: Option<u8>,
}

fn products(group: &dyn Group, a: &[Word], b: &[Word]) -> BTreeSet<Word> {
    a.iter().flat_map(|x| b.iter().map(move |y| group.mul(x, y))).collect()
}

/// Direct-product counting for a finite `U ⊆ H₁ × H₂` on supplied trial sets.
pub fn product_inequalities(
    h1: &dyn Group,
    h2: &dyn Group,
    u: &[(Word, Word)],
    trials: &[(Vec<Word>, Vec<Word>)],
) -> Vec<ProductTrial> {
    let u1: Vec<Word> = u.iter().map(|(x, _)| h1.normal_form(x)).collect::<BTreeSet<_>>().into_iter().collect();
    let u2: Vec<Word> = u.iter().map(|(_, y)| h2.normal_form(y)).collect::<BTreeSet<_>>().into_iter().collect();
    let u1sq: Vec<Word> = products(h1, &u1, &u1).into_iter().collect();
    let u2sq: Vec<Word> = products(h2, &u2, &u2).into_iter().collect();
    trials
        .iter()
        .map(|(f1, f2)| {
            let f1: Vec<Word> = f1.iter().map(|w| h1.normal_form(w)).collect::<BTreeSet<_>>().into_iter().collect();
            let f2: Vec<Word> = f2.iter().map(|w| h2.normal_form(w)).collect::<BTreeSet<_>>().into_iter().collect();
            let fu: BTreeSet<(Word, Word)> = f1
                .iter()
                .flat_map(|a| f2.iter().map(move |b| (a, b)))
                .flat_map(|(a, b)| u.iter().map(move |(x, y)| (h1.mul(a, x), h2.mul(b, y))))
                .collect();
            let f1u1 = products(h1, &f1, &u1).len();
            let f2u2 = products(h2, &f2, &u2).len();
            let f = f1.len() * f2.len();
            let expanding = fu.len() >= 2 * f;
            let branch = expanding.then(|| if f1u1 * f1u1 >= 2 * f1.len() * f1.len() { 1 } else { 2 });
            ProductTrial {
                f,
                fu: fu.len(),
                f1: f1.len(),
                f1u1,
                f1u1u1: products(h1, &f1, &u1sq).len(),
                f2: f2.len(),
                f2u2,
                f2u2u2: products(h2, &f2, &u2sq).len(),
                product_ok: f1u1 * f2u2 >= fu.len(),
                expanding,
                branch,
            }
        })
        .collect()
}

/// `2(n − 1)²`.
pub fn direct_product_bound(n: u64) -> u64 {
    2 * (n - 1) * (n - 1)
}
