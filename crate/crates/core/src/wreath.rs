//! Sparse elements of a wreath product `G ≀ C_n`.
//!
//! An element is a pair `(f, t)` with `f: Z/n → G` finitely supported and
//! `t ∈ Z/n`. Multiplication is `(f₁,t₁)(f₂,t₂) = (c ↦ f₁(c)·f₂(c+t₁), t₁+t₂)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathElement {
    /// Never stores the identity.
    base: BTreeMap<u64, Word>,
    top: u64,
    n: u64,
}

impl WreathElement {
    pub fn identity(n: u64) -> Self {
        WreathElement { base: BTreeMap::new(), top: 0, n }
    }

    /// The generator `z` of the top group.
    pub fn shift(n: u64, by: u64) -> Self {
        WreathElement { base: BTreeMap::new(), top: by % n, n }
    }

    /// A base-group element from `(point, value)` pairs.
    pub fn from_base(group: &dyn Group, n: u64, values: impl IntoIterator<Item = (u64, Word)>) -> Self {
        let mut e = WreathElement::identity(n);
        for (c, w) in values {
            let w = group.normal_form(&w);
            if !w.is_identity() {
                e.base.insert(c % n, w);
            }
        }
        e
    }

    /// `δ(g)`: value `g` at the identity of `C_n`, trivial elsewhere.
    pub fn delta(group: &dyn Group, n: u64, g: &Word) -> Self {
        WreathElement::from_base(group, n, [(0, g.clone())])
    }

    pub fn value(&self, c: u64) -> Word {
        self.base.get(&(c % self.n)).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> Vec<u64> {
        self.base.keys().copied().collect()
    }

    pub fn top(&self) -> u64 {
        self.top
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        self.top == 0 && self.base.is_empty()
    }

    pub fn mul(&self, other: &WreathElement, group: &dyn Group) -> WreathElement {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut points: Vec<u64> = self.base.keys().copied().collect();
        // other's support shifted back by self.top
        points.extend(other.base.keys().map(|&c| (c + n - self.top) % n));
        points.sort_unstable();
        points.dedup();
        let mut base = BTreeMap::new();
        for c in points {
            let v = group.mul(&self.value(c), &other.value((c + self.top) % n));
            if !v.is_identity() {
                base.insert(c, v);
            }
        }
        WreathElement { base, top: (self.top + other.top) % n, n }
    }

    pub fn inv(&self, group: &dyn Group) -> WreathElement {
        // (f, t)⁻¹ = (c ↦ f(c − t)⁻¹, −t)
        let n = self.n;
        let base = self.base.iter().map(|(&c, w)| ((c + self.top) % n, group.inv(w))).collect();
        WreathElement { base, top: (n - self.top) % n, n }
    }

    /// `g⁻¹·self·g`.
    pub fn conj(&self, g: &WreathElement, group: &dyn Group) -> WreathElement {
        g.inv(group).mul(self, group).mul(g, group)
    }

    pub fn pow(&self, exp: i64, group: &dyn Group) -> WreathElement {
        let base = if exp < 0 { self.inv(group) } else { self.clone() };
        let mut out = WreathElement::identity(self.n);
        for _ in 0..exp.unsigned_abs() {
            out = out.mul(&base, group);
        }
        out
    }

    /// `x·y·x⁻¹·y⁻¹`, matching [`Word::commutator`].
    pub fn commutator(x: &WreathElement, y: &WreathElement, group: &dyn Group) -> WreathElement {
        x.mul(y, group).mul(&x.inv(group), group).mul(&y.inv(group), group)
    }
}

fn pow_mod(base: u128, mut exp: u128, modulus: u128) -> u128 {
    let mut result = 1 % modulus;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % modulus;
        }
        b = b * b % modulus;
        exp >>= 1;
    }
    result
}

/// `2^(2^i) mod n`.
fn tower_position(i: u32, n: u64) -> u64 {
    let exp = 1u128 << i;
    pow_mod(2, exp, n as u128) as u64
}

/// Outcome of the wreath identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathCheck {
    pub holds: bool,
    /// Support of the commutator on the left-hand side.
    pub lhs_support: Vec<u64>,
    pub positions: Vec<u64>,
}

/// Builds `a` (value `x_k` at `z^(2^(2^k))`, `k = 1..d`) and the shift `z` in
/// `G ≀ C_n`, and checks `[a^{z^{-m_i}}, a^{z^{-m_j}}] = δ([x_i, x_j])` with
/// `m_k = 2^(2^k)`. Generators `i`, `j` are one-based.
pub fn neumann_embed_check(group: &dyn Group, d: usize, i: usize, j: usize, n: u64) -> Result<WreathCheck> {
    if d < 1 || d > group.rank() {
        return Err(Error::InvalidArgument(format!("d = {d} must lie in 1..={}", group.rank())));
    }
    if !(1..=d).contains(&i) || !(1..=d).contains(&j) {
        return Err(Error::InvalidArgument(format!("generator indices {i}, {j} must lie in 1..={d}")));
    }
    // n > 2^(2^(2d))
    let bound_exp = 1u32 << (2 * d as u32).min(31);
    let too_small = bound_exp >= 64 || n as u128 <= 1u128 << bound_exp;
    if too_small {
        return Err(Error::WreathTooSmall { n, bound: format!("2^{bound_exp}") });
    }
    let positions: Vec<u64> = (1..=d as u32).map(|k| tower_position(k, n)).collect();
    let a = WreathElement::from_base(group, n, positions.iter().enumerate().map(|(k, &c)| (c, Word::gen(k as u16))));
    let conj_by = |k: usize| {
        let m = positions[k - 1];
        // z^{-m}
        let zm = WreathElement::shift(n, (n - m % n) % n);
        a.conj(&zm, group)
    };
    let lhs = WreathElement::commutator(&conj_by(i), &conj_by(j), group);
    let rhs = WreathElement::delta(group, n, &Word::commutator(&Word::gen(i as u16 - 1), &Word::gen(j as u16 - 1)));
    Ok(WreathCheck { holds: lhs == rhs, lhs_support: lhs.support(), positions })
}
