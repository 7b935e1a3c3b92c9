//! Golod–Shafarevich and p-deficiency calculators.
//!
//! Degrees in the Zassenhaus p-filtration of a free group are read off the
//! Magnus expansion `x ↦ 1 + X` over `F_p`: `deg w` is the lowest total
//! degree of a nonzero term of `expand(w) − 1`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::word::{Alphabet, Letter, Word};

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p = {p} is not prime")))
    }
}

/// Power series in non-commuting `X₁…X_d` over `F_p`, truncated above degree `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    p: u32,
    trunc: usize,
    terms: BTreeMap<Vec<u16>, u32>,
}

impl TruncSeries {
    pub fn one(p: u32, trunc: usize) -> Self {
        TruncSeries { p, trunc, terms: BTreeMap::from([(Vec::new(), 1)]) }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u16>, u32> {
        &self.terms
    }

    pub fn coefficient(&self, monomial: &[u16]) -> u32 {
        self.terms.get(monomial).copied().unwrap_or(0)
    }

    fn add_term(terms: &mut BTreeMap<Vec<u16>, u32>, m: Vec<u16>, c: u32, p: u32) {
        let e = terms.entry(m).or_insert(0);
        *e = (*e + c) % p;
    }

    fn prune(terms: &mut BTreeMap<Vec<u16>, u32>) {
        terms.retain(|_, c| *c != 0);
    }

    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1.len() + m2.len() <= self.trunc {
                    let m = [m1.as_slice(), m2.as_slice()].concat();
                    Self::add_term(&mut terms, m, (*c1 as u64 * *c2 as u64 % self.p as u64) as u32, self.p);
                }
            }
        }
        Self::prune(&mut terms);
        TruncSeries { p: self.p, trunc: self.trunc, terms }
    }

    /// Right multiplication by the image of one letter.
    pub fn mul_letter(&self, l: Letter) -> TruncSeries {
        let p = self.p;
        let mut terms = self.terms.clone();
        for (m, c) in &self.terms {
            let mut m = m.clone();
            // x ↦ 1 + X, x⁻¹ ↦ Σ (−X)^k
            let mut coeff = *c;
            while m.len() < self.trunc {
                m.push(l.gen);
                if l.inv {
                    coeff = (p - coeff) % p;
                }
                Self::add_term(&mut terms, m.clone(), coeff, p);
                if !l.inv {
                    break;
                }
            }
        }
        Self::prune(&mut terms);
        TruncSeries { p, trunc: self.trunc, terms }
    }

    /// Lowest degree of a nonzero term of `self − 1`.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.iter().filter(|(m, c)| !(m.is_empty() && **c == 1)).map(|(m, _)| m.len()).min()
    }
}

pub fn magnus_expand(w: &Word, p: u32, trunc: usize) -> TruncSeries {
    w.letters().iter().fold(TruncSeries::one(p, trunc), |s, &l| s.mul_letter(l))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degree {
    Exact(usize),
    /// Every term of degree below the bound vanishes.
    AtLeast(usize),
    Infinite,
}

impl Degree {
    pub fn lower(self) -> Option<usize> {
        match self {
            Degree::Exact(n) | Degree::AtLeast(n) => Some(n),
            Degree::Infinite => None,
        }
    }

    pub fn is_resolved(self) -> bool {
        !matches!(self, Degree::AtLeast(_))
    }
}

pub fn default_trunc(p: u32) -> usize {
    8.max(p as usize + 1)
}

/// Degree in the Zassenhaus p-filtration, exact up to `trunc`.
pub fn zassenhaus_deg(w: &Word, p: u32, trunc: usize) -> Result<Degree> {
    check_prime(p)?;
    if trunc == 0 {
        return Err(Error::InvalidArgument("truncation degree must be at least 1".into()));
    }
    if w.is_identity() {
        return Ok(Degree::Infinite);
    }
    let mut d = 1;
    loop {
        let d_now = d.min(trunc);
        if let Some(n) = magnus_expand(w, p, d_now).min_degree() {
            return Ok(Degree::Exact(n));
        }
        if d_now == trunc {
            return Ok(Degree::AtLeast(trunc + 1));
        }
        d *= 2;
    }
}

/// Parses `0.13`, `13/100` or `1` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32)))
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn check_tau(tau: &BigRational) -> Result<()> {
    if tau.is_positive() && tau < &BigRational::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("τ = {tau} is not in (0, 1)")))
    }
}

/// `W = τ^deg` as an interval: exact for resolved degrees, `[0, τ^n]` for `deg ≥ n`.
pub fn weight(deg: Degree, tau: &BigRational) -> (BigRational, BigRational) {
    match deg {
        Degree::Exact(n) => {
            let w = tau.pow(n as i32);
            (w.clone(), w)
        }
        Degree::AtLeast(n) => (BigRational::zero(), tau.pow(n as i32)),
        Degree::Infinite => (BigRational::zero(), BigRational::zero()),
    }
}

/// Relator `base^{p^n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relator {
    pub base: Word,
    pub n: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relators: Vec<Relator>,
    pub p: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub alphabet: Vec<String>,
    pub relators: Vec<String>,
    pub p: u32,
    /// Relator `i` is `relators[i]` raised to `p^exponents[i]`.
    pub exponents: Vec<u32>,
}

/// Longest relator that is expanded letter by letter.
const MATERIALIZE_LIMIT: u64 = 1 << 16;

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Relator>, p: u32) -> Result<Self> {
        check_prime(p)?;
        for r in &relators {
            alphabet.check(&r.base)?;
        }
        Ok(Presentation { alphabet, relators, p })
    }

    /// `p^n`, if it fits.
    fn power(&self, n: u32) -> Option<u64> {
        (self.p as u64).checked_pow(n)
    }

    /// The relator as a word, when its length stays reasonable.
    pub fn relator_word(&self, i: usize) -> Option<Word> {
        let r = &self.relators[i];
        let e = self.power(r.n)?;
        (r.base.len() as u64).checked_mul(e).filter(|&l| l <= MATERIALIZE_LIMIT)?;
        Some(r.base.pow(e as i64))
    }

    /// Degree of relator `i`; long powers fall back to `deg(u^{p^n}) ≥ p^n·deg(u)`.
    pub fn relator_degree(&self, i: usize, trunc: usize) -> Result<Degree> {
        if let Some(w) = self.relator_word(i) {
            return zassenhaus_deg(&w, self.p, trunc);
        }
        let r = &self.relators[i];
        let base = zassenhaus_deg(&r.base, self.p, trunc)?;
        Ok(match base.lower() {
            None => Degree::Infinite,
            Some(d) => {
                let lo = self.power(r.n).and_then(|e| (d as u64).checked_mul(e)).unwrap_or(u64::MAX);
                Degree::AtLeast(lo.min(trunc as u64 + 1) as usize)
            }
        })
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            alphabet: self.alphabet.names().to_vec(),
            relators: self.relators.iter().map(|r| self.alphabet.format(&r.base)).collect(),
            p: self.p,
            exponents: self.relators.iter().map(|r| r.n).collect(),
        }
    }

    pub fn from_json(json: &PresentationJson) -> Result<Self> {
        let alphabet = Alphabet::new(json.alphabet.iter().cloned())?;
        if json.relators.len() != json.exponents.len() {
            return Err(Error::Parse("one exponent per relator".into()));
        }
        let relators = json
            .relators
            .iter()
            .zip(&json.exponents)
            .map(|(s, &n)| Ok(Relator { base: alphabet.parse(s)?, n }))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(alphabet, relators, json.p)
    }
}

/// `x_i^p` and `[x_i, x_j, x_j]` for `i ≠ j`.
pub fn g_pd_presentation(d: usize, p: u32) -> Result<Presentation> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let x = |i: usize| Word::gen(i as u16);
    let mut relators: Vec<Relator> = (0..d).map(|i| Relator { base: x(i), n: 1 }).collect();
    for i in 0..d {
        for j in (0..d).filter(|&j| j != i) {
            relators.push(Relator { base: Word::commutator_left_normed(&[x(i), x(j), x(j)]), n: 0 });
        }
    }
    Presentation::new(Alphabet::indexed("x", d), relators, p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GsReport {
    pub tau: BigRational,
    pub trunc: usize,
    pub degrees: Vec<Degree>,
    /// `W(X) − W(R) − 1` lies in `[lower, upper]`.
    pub lower: BigRational,
    pub upper: BigRational,
    pub exact: bool,
}

impl GsReport {
    pub fn value(&self) -> f64 {
        to_f64(&((&self.lower + &self.upper) / BigInt::from(2)))
    }

    /// `Some(true)` when the condition provably holds, `Some(false)` when it
    /// provably fails, `None` when truncation leaves it open.
    pub fn holds(&self) -> Option<bool> {
        if self.lower.is_positive() {
            Some(true)
        } else if !self.upper.is_positive() {
            Some(false)
        } else {
            None
        }
    }

    pub fn truncation_error(&self) -> f64 {
        to_f64(&(&self.upper - &self.lower))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut hist: BTreeMap<String, usize> = BTreeMap::new();
        for d in &self.degrees {
            let key = match d {
                Degree::Exact(n) => n.to_string(),
                Degree::AtLeast(n) => format!(">={n}"),
                Degree::Infinite => "inf".into(),
            };
            *hist.entry(key).or_default() += 1;
        }
        json!({
            "tau": self.tau.to_string(),
            "trunc": self.trunc,
            "value": format!("{:.9}", self.value()),
            "lower": format!("{:.9}", to_f64(&self.lower)),
            "upper": format!("{:.9}", to_f64(&self.upper)),
            "truncation_error": format!("{:.3e}", self.truncation_error()),
            "exact": self.exact,
            "holds": self.holds(),
            "relator_degrees": hist,
        })
    }
}

pub fn gs_check(pres: &Presentation, tau: &BigRational, trunc: usize) -> Result<GsReport> {
    check_tau(tau)?;
    let degrees = (0..pres.relators.len()).map(|i| pres.relator_degree(i, trunc)).collect::<Result<Vec<_>>>()?;
    gs_value(pres.alphabet.rank(), &degrees, tau, trunc)
}

/// The GS value from relator degrees alone.
pub fn gs_value(generators: usize, degrees: &[Degree], tau: &BigRational, trunc: usize) -> Result<GsReport> {
    check_tau(tau)?;
    let base = BigRational::from_integer(BigInt::from(generators)) * tau - BigRational::one();
    let (mut lower, mut upper) = (base.clone(), base);
    for &d in degrees {
        let (lo, hi) = weight(d, tau);
        lower -= hi;
        upper -= lo;
    }
    Ok(GsReport { tau: tau.clone(), trunc, degrees: degrees.to_vec(), exact: lower == upper, lower, upper })
}

/// Conservative value `|X|τ − Σ τ^{lower degree} − 1` in floating point.
fn gs_float(generators: usize, degrees: &[Degree], tau: f64) -> f64 {
    generators as f64 * tau - degrees.iter().filter_map(|d| d.lower()).map(|n| tau.powi(n as i32)).sum::<f64>() - 1.0
}

/// Best `τ` on a grid, refined by golden-section search around it.
pub fn gs_optimize(generators: usize, degrees: &[Degree], grid: usize) -> (f64, f64) {
    let grid = grid.max(2);
    let f = |t: f64| gs_float(generators, degrees, t);
    let step = 1.0 / (grid + 1) as f64;
    let best = (1..=grid).map(|i| i as f64 * step).max_by(|a, b| f(*a).total_cmp(&f(*b))).expect("grid");
    let (mut lo, mut hi) = ((best - step).max(1e-12), (best + step).min(1.0 - 1e-12));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let t = (lo + hi) / 2.0;
    if f(t) >= f(best) {
        (t, f(t))
    } else {
        (best, f(best))
    }
}

/// `w = u^m` with `m` maximal.
pub fn primitive_root(w: &Word) -> Result<(Word, u64)> {
    if w.is_identity() {
        return Err(Error::IdentityWord);
    }
    let (core, conj) = w.cyclic_reduce();
    let letters = core.letters();
    let n = letters.len();
    let period =
        (1..=n).find(|&d| n % d == 0 && letters.iter().enumerate().all(|(i, l)| *l == letters[i % d])).expect("n is a period");
    let u = core.prefix(period).conj(&conj);
    Ok((u, (n / period) as u64))
}

/// `w = s^{p^e}` with `s` not a p-th power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDecomposition {
    pub s: Word,
    pub e: u32,
}

pub fn p_parts(w: &Word, p: u32) -> Result<RootDecomposition> {
    check_prime(p)?;
    let (u, m) = primitive_root(w)?;
    let mut e = 0;
    let mut rest = m;
    while rest % p as u64 == 0 {
        rest /= p as u64;
        e += 1;
    }
    let s = u.pow(rest as i64);
    debug_assert_eq!(&s.pow((p as i64).pow(e)), w);
    Ok(RootDecomposition { s, e })
}

/// `|X| − 1 − Σ_r p^{−e(r)}`.
pub fn p_deficiency(generators: usize, relators: &[Word], p: u32) -> Result<BigRational> {
    let mut out = BigRational::from_integer(BigInt::from(generators as i64 - 1));
    for r in relators {
        let e = p_parts(r, p)?.e;
        out -= BigRational::new(BigInt::one(), BigInt::from(p).pow(e));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtpReport {
    pub bound: BigRational,
    pub sum: BigRational,
    /// `|X| = 3` and `Σ ≤ ½`.
    pub tarski_flag: bool,
    pub conclusions: Vec<String>,
}

impl PtpReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "bound": self.bound.to_string(),
            "bound_float": to_f64(&self.bound),
            "sum": self.sum.to_string(),
            "tarski_flag": self.tarski_flag,
            "conclusions": self.conclusions,
        })
    }
}

/// `|X| − 1 − Σ_i p^{−n_i}`.
pub fn ptp_bound(generators: usize, p: u32, exponents: &[u32]) -> Result<PtpReport> {
    check_prime(p)?;
    let sum: BigRational = exponents
        .iter()
        .map(|&n| BigRational::new(BigInt::one(), BigInt::from(p).pow(n)))
        .fold(BigRational::zero(), |a, b| a + b);
    let bound = BigRational::from_integer(BigInt::from(generators as i64 - 1)) - &sum;
    let tarski_flag = generators == 3 && sum <= BigRational::new(BigInt::one(), BigInt::from(2));
    let conclusions = if tarski_flag {
        vec![
            "torsion relators (all elements): Tarski number 6".to_string(),
            "relators from the derived subgroup: Tarski number 5".to_string(),
        ]
    } else {
        Vec::new()
    };
    Ok(PtpReport { bound, sum, tarski_flag, conclusions })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelatorMode {
    Full,
    Derived,
}

/// First `count` relators `r_i^{p^{i+1}}`, `r_i` running through the
/// nontrivial reduced words (or those with zero exponent sums) in shortlex order.
pub fn burnside_like_presentation(d: usize, p: u32, count: usize, mode: RelatorMode) -> Result<Presentation> {
    if d < 2 || count == 0 {
        return Err(Error::InvalidArgument("need d ≥ 2 and at least one relator".into()));
    }
    let alphabet = Alphabet::indexed("x", d);
    let mut bases = Vec::with_capacity(count);
    let mut len = 1;
    while bases.len() < count {
        for w in alphabet.words_of_length(len) {
            if mode == RelatorMode::Full || w.abelianization(d).iter().all(|&c| c == 0) {
                bases.push(w);
                if bases.len() == count {
                    break;
                }
            }
        }
        len += 1;
    }
    let relators = bases.into_iter().enumerate().map(|(i, base)| Relator { base, n: i as u32 + 2 }).collect();
    Presentation::new(alphabet, relators, p)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub checked: usize,
    pub violations: usize,
    pub unresolved: usize,
}

impl PropertyReport {
    fn record(&mut self, outcome: Option<bool>) {
        self.checked += 1;
        match outcome {
            Some(true) => {}
            Some(false) => self.violations += 1,
            None => self.unresolved += 1,
        }
    }
}

/// Upper end of what a degree can be (`None` = unbounded).
fn upper(d: Degree) -> Option<usize> {
    match d {
        Degree::Exact(n) => Some(n),
        _ => None,
    }
}

/// `lhs ≥ rhs` as far as the truncated degrees decide it; `None` = undecided.
fn at_least(lhs: Degree, rhs_lower: Option<usize>, rhs_upper: Option<usize>) -> Option<bool> {
    let l_lo = lhs.lower();
    let l_hi = if lhs == Degree::Infinite { None } else { upper(lhs) };
    match (l_lo, rhs_upper) {
        (None, _) => Some(true),
        (Some(a), Some(b)) if a >= b => Some(true),
        _ => match (l_hi, rhs_lower) {
            (Some(a), Some(b)) if a < b => Some(false),
            (Some(_), None) => Some(false),
            _ => None,
        },
    }
}

fn add(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    a.zip(b).map(|(x, y)| x + y)
}

/// The weight-function properties on word pairs, in degree form:
/// `deg(gh) ≥ min`, `deg(g⁻¹) = deg(g)`, `deg([g,h]) ≥ deg g + deg h`,
/// `deg(g^p) ≥ p·deg g`.
pub fn weight_properties(pairs: &[(Word, Word)], p: u32, trunc: usize) -> Result<[PropertyReport; 4]> {
    let mut out: [PropertyReport; 4] = Default::default();
    let hi = |d: Degree| if d == Degree::Infinite { None } else { upper(d) };
    for (g, h) in pairs {
        let dg = zassenhaus_deg(g, p, trunc)?;
        let dh = zassenhaus_deg(h, p, trunc)?;
        let (lo_g, lo_h) = (dg.lower(), dh.lower());
        let min_lo = match (lo_g, lo_h) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let min_hi = [hi(dg), hi(dh)].into_iter().flatten().min();
        let dgh = zassenhaus_deg(&g.mul(h), p, trunc)?;
        out[0].record(if min_lo.is_none() { Some(dgh == Degree::Infinite) } else { at_least(dgh, min_lo, min_hi) });
        let dinv = zassenhaus_deg(&g.inv(), p, trunc)?;
        out[1].record(match (dg, dinv) {
            (Degree::Exact(a), Degree::Exact(b)) => Some(a == b),
            (Degree::Infinite, x) | (x, Degree::Infinite) => Some(x == Degree::Infinite),
            (Degree::Exact(_), Degree::AtLeast(_)) | (Degree::AtLeast(_), Degree::Exact(_)) => Some(false),
            _ => None,
        });
        let dc = zassenhaus_deg(&Word::commutator(g, h), p, trunc)?;
        let sum_lo = add(lo_g, lo_h);
        out[2].record(if lo_g.is_none() || lo_h.is_none() { Some(true) } else { at_least(dc, sum_lo, add(hi(dg), hi(dh))) });
        let dp = zassenhaus_deg(&g.pow(p as i64), p, trunc)?;
        out[3].record(match lo_g {
            None => Some(dp == Degree::Infinite),
            Some(a) => at_least(dp, Some(a * p as usize), hi(dg).map(|b| b * p as usize)),
        });
    }
    Ok(out)
}
