//! The two bijective codings: `#` on finite sequences of naturals and the
//! pair coding `#_F` on equal-length pairs `(h̄, d̄) ∈ ∏_{k<l} F(k) × 2^l`.
//!
//! `#_F` enumerates levels in order. A level whose count
//! `|∏_{k<l} F(k)|·2^l` is finite occupies the consecutive block
//! `[offset(l), offset(l+1))`, ranked by `(h̄, d̄)` in lexicographic order.
//! Under the growth condition `offset(l+1) ≤ F(l)`, which is exactly the
//! appropriateness requirement `#_F(h̄, d̄) < F(l)`. Levels with an infinite
//! count are dovetailed through Cantor pairing after all finite blocks.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::bounds::{BoundSpec, ExtNat, Nat};
use crate::error::{Error, Result};

/// A finite sequence of naturals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSeq(pub Vec<Nat>);

impl FinSeq {
    pub fn new() -> Self {
        FinSeq(Vec::new())
    }
}

impl Deref for FinSeq {
    type Target = [Nat];
    fn deref(&self) -> &[Nat] {
        &self.0
    }
}

impl From<Vec<Nat>> for FinSeq {
    fn from(v: Vec<Nat>) -> Self {
        FinSeq(v)
    }
}

impl From<&[u64]> for FinSeq {
    fn from(v: &[u64]) -> Self {
        FinSeq(v.iter().map(|&x| Nat::from(x)).collect())
    }
}

impl<const N: usize> From<[u64; N]> for FinSeq {
    fn from(v: [u64; N]) -> Self {
        FinSeq::from(&v[..])
    }
}

impl FromIterator<Nat> for FinSeq {
    fn from_iter<I: IntoIterator<Item = Nat>>(iter: I) -> Self {
        FinSeq(iter.into_iter().collect())
    }
}

/// Comma-separated naturals; the empty string is the empty sequence.
impl FromStr for FinSeq {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(FinSeq::new());
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<Nat>()
                    .map_err(|_| Error::Precondition(format!("not a natural number: {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(FinSeq)
    }
}

impl fmt::Display for FinSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for FinSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for v in &self.0 {
            seq.serialize_element(&crate::json::nat_value(v))?;
        }
        seq.end()
    }
}

/// A finite 0/1 sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSeq(pub Vec<bool>);

impl BitSeq {
    pub fn new() -> Self {
        BitSeq(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        BitSeq(vec![false; len])
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }
}

impl Deref for BitSeq {
    type Target = [bool];
    fn deref(&self) -> &[bool] {
        &self.0
    }
}

impl From<Vec<bool>> for BitSeq {
    fn from(v: Vec<bool>) -> Self {
        BitSeq(v)
    }
}

impl From<&[bool]> for BitSeq {
    fn from(v: &[bool]) -> Self {
        BitSeq(v.to_vec())
    }
}

/// A string of `0`/`1` characters, `c(0)` first.
impl FromStr for BitSeq {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Precondition(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitSeq)
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An element `(h̄, d̄)` of the domain of `#_F`; both components share the level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PairCode {
    pub h: FinSeq,
    pub d: BitSeq,
}

impl PairCode {
    pub fn level(&self) -> usize {
        self.h.len()
    }
}

/// Cantor pairing `π(x, y) = (x+y)(x+y+1)/2 + y`.
pub fn pair(x: &Nat, y: &Nat) -> Nat {
    let s = x + y;
    ((&s * (&s + 1u32)) >> 1) + y
}

/// Inverse of [`pair`].
pub fn unpair(z: &Nat) -> (Nat, Nat) {
    let disc: Nat = (z << 3u32) + 1u32;
    let w: Nat = (disc.sqrt() - 1u32) >> 1u32;
    let t = (&w * (&w + 1u32)) >> 1;
    let y = z - t;
    let x = w - &y;
    (x, y)
}

/// `#`: `#∅ = 0`, `#(s⌢a) = π(#s, a) + 1`. Every step adds at least one,
/// so `#s ≥ len(s)` and codes strictly increase along extensions.
pub fn encode_seq(s: &[Nat]) -> Nat {
    s.iter().fold(Nat::zero(), |code, a| pair(&code, a) + 1u32)
}

pub fn decode_seq(code: &Nat) -> FinSeq {
    let mut items = Vec::new();
    let mut code = code.clone();
    while !code.is_zero() {
        let (rest, a) = unpair(&(code - 1u32));
        items.push(a);
        code = rest;
    }
    items.reverse();
    FinSeq(items)
}

/// `#(s↾j)` for `j = 0, 1, …, len(s)`, stopping at the first code `≥ bound`.
pub fn prefix_codes_below(s: &[Nat], bound: &Nat) -> Vec<Nat> {
    let mut out = Vec::new();
    let mut code = Nat::zero();
    for j in 0..=s.len() {
        if j > 0 {
            code = pair(&code, &s[j - 1]) + 1u32;
        }
        if &code >= bound {
            break;
        }
        out.push(code.clone());
    }
    out
}

/// Balanced iterated pairing `ℕ^r → ℕ` for fixed `r ≥ 1`.
fn tuple_encode(xs: &[Nat]) -> Nat {
    match xs.len() {
        0 => Nat::zero(),
        1 => xs[0].clone(),
        n => pair(&tuple_encode(&xs[..n / 2]), &tuple_encode(&xs[n / 2..])),
    }
}

fn tuple_decode(z: &Nat, r: usize, out: &mut Vec<Nat>) {
    match r {
        0 => {}
        1 => out.push(z.clone()),
        _ => {
            let (x, y) = unpair(z);
            tuple_decode(&x, r / 2, out);
            tuple_decode(&y, r - r / 2, out);
        }
    }
}

/// `|∏_{k<l} F(k)| · 2^l`.
pub fn level_count(spec: &BoundSpec, l: usize) -> ExtNat {
    (0..l).fold(ExtNat::pow2(l), |acc, k| &acc * &spec.eval(k))
}

#[derive(Debug, Default)]
struct LevelTable {
    /// `products[l] = ∏_{k<l} F(k)`
    products: Vec<Nat>,
    /// `offsets[l] = Σ_{j<l} count(j)`
    offsets: Vec<Nat>,
}

#[derive(Debug)]
struct Inner {
    spec: BoundSpec,
    /// First level whose count is infinite.
    infinite_from: Option<usize>,
    table: RwLock<LevelTable>,
}

/// The pair coding `#_F` for one bound function. Cheap to clone; level
/// offsets are computed on demand and shared between clones.
#[derive(Clone, Debug)]
pub struct PairCodec {
    inner: Arc<Inner>,
}

impl PairCodec {
    pub fn new(spec: BoundSpec) -> Self {
        let infinite_from = spec.first_infinite_index().map(|k| k + 1);
        let table = LevelTable { products: vec![Nat::one()], offsets: vec![Nat::zero()] };
        PairCodec { inner: Arc::new(Inner { spec, infinite_from, table: RwLock::new(table) }) }
    }

    pub fn spec(&self) -> &BoundSpec {
        &self.inner.spec
    }

    /// First level with infinitely many pairs, if any.
    pub fn infinite_from(&self) -> Option<usize> {
        self.inner.infinite_from
    }

    pub fn level_is_finite(&self, l: usize) -> bool {
        self.inner.infinite_from.is_none_or(|lim| l < lim)
    }

    /// Makes `offsets[l]` and `products[l]` available. Only valid for
    /// `l ≤ infinite_from`.
    fn ensure(&self, l: usize) {
        if self.inner.table.read().unwrap().offsets.len() > l {
            return;
        }
        let mut t = self.inner.table.write().unwrap();
        while t.offsets.len() <= l {
            let j = t.offsets.len() - 1;
            let count = &t.products[j] << j;
            let next_offset = &t.offsets[j] + count;
            let next_product = match self.inner.spec.eval(j) {
                ExtNat::Fin(f) => &t.products[j] * f,
                // Only reached when building offsets[infinite_from]; the
                // product past it is never read.
                ExtNat::Inf => Nat::zero(),
            };
            t.offsets.push(next_offset);
            t.products.push(next_product);
        }
    }

    /// `Σ_{j<l} count(j)` for a finitely counted level `l` (or `l = infinite_from`).
    pub fn offset(&self, l: usize) -> Nat {
        self.ensure(l);
        self.inner.table.read().unwrap().offsets[l].clone()
    }

    /// Number of codes used by finitely counted levels, when that is finite.
    pub fn finite_zone(&self) -> Option<Nat> {
        self.inner.infinite_from.map(|l| self.offset(l))
    }

    fn validate(&self, h: &[Nat], d: &[bool]) -> Result<()> {
        if h.len() != d.len() {
            return Err(Error::InvalidPair(format!(
                "component lengths differ ({} vs {})",
                h.len(),
                d.len()
            )));
        }
        for (k, v) in h.iter().enumerate() {
            if !self.inner.spec.admits(k, v) {
                return Err(Error::InvalidPair(format!(
                    "h({k}) = {v} is not below F({k}) = {}",
                    self.inner.spec.eval(k)
                )));
            }
        }
        Ok(())
    }

    /// Rank code of a pair on a finitely counted level, without the
    /// appropriateness check.
    pub fn rank_code(&self, h: &[Nat], d: &[bool]) -> Result<Nat> {
        self.validate(h, d)?;
        let l = h.len();
        if !self.level_is_finite(l) {
            return Err(Error::InvalidPair(format!("level {l} is not finitely counted")));
        }
        Ok(self.rank_unchecked(h, d))
    }

    fn rank_unchecked(&self, h: &[Nat], d: &[bool]) -> Nat {
        let l = h.len();
        let mut hrank = Nat::zero();
        for (k, v) in h.iter().enumerate() {
            let f = self.inner.spec.eval(k);
            hrank = hrank * f.as_finite().expect("finite level") + v;
        }
        let drank = bits_rank(d);
        self.offset(l) + (hrank << l) + drank
    }

    /// `#_F(h̄, d̄)`.
    pub fn encode(&self, h: &[Nat], d: &[bool]) -> Result<Nat> {
        self.validate(h, d)?;
        let l = h.len();
        if self.level_is_finite(l) {
            let code = self.rank_unchecked(h, d);
            if let ExtNat::Fin(bound) = self.inner.spec.eval(l) {
                if code >= bound {
                    return Err(Error::NotAppropriate { level: l, code, bound });
                }
            }
            return Ok(code);
        }
        let base = self.inner.infinite_from.expect("infinite level");
        let (radices, infinite) = self.split_level(l);
        let mut rank_a = Nat::zero();
        let mut inf_values = Vec::with_capacity(infinite.len());
        for (k, v) in h.iter().enumerate() {
            match &radices[k] {
                Some(f) => rank_a = rank_a * f + v,
                None => inf_values.push(v.clone()),
            }
        }
        rank_a = (rank_a << l) + bits_rank(d);
        let size_a = self.finite_part_size(&radices, l);
        let w = tuple_encode(&inf_values) * size_a + rank_a;
        Ok(self.offset(base) + pair(&Nat::from(l - base), &w))
    }

    pub fn encode_pair(&self, p: &PairCode) -> Result<Nat> {
        self.encode(&p.h, &p.d)
    }

    /// `#_F⁻¹`.
    pub fn decode(&self, code: &Nat) -> PairCode {
        match self.finite_zone() {
            Some(zone) if *code >= zone => self.decode_dovetail(&(code - zone)),
            _ => self.decode_ranked(code),
        }
    }

    fn decode_ranked(&self, code: &Nat) -> PairCode {
        let mut l = 0;
        loop {
            self.ensure(l + 1);
            if self.inner.table.read().unwrap().offsets[l + 1] > *code {
                break;
            }
            l += 1;
        }
        let r = code - self.offset(l);
        let mut hrank = &r >> l;
        let d = bits_unrank(&r, l);
        let mut h = vec![Nat::zero(); l];
        for k in (0..l).rev() {
            let f = self.inner.spec.eval(k);
            let (q, digit) = hrank.div_rem(f.as_finite().expect("finite level"));
            h[k] = digit;
            hrank = q;
        }
        PairCode { h: FinSeq(h), d: BitSeq(d) }
    }

    fn decode_dovetail(&self, z: &Nat) -> PairCode {
        let base = self.inner.infinite_from.expect("infinite level");
        let (i, w) = unpair(z);
        let l = base + i.to_usize().expect("level index fits in usize");
        let (radices, infinite) = self.split_level(l);
        let size_a = self.finite_part_size(&radices, l);
        let (zinf, rank_a) = w.div_rem(&size_a);
        let d = bits_unrank(&rank_a, l);
        let mut rest = rank_a >> l;
        let mut h = vec![Nat::zero(); l];
        for k in (0..l).rev() {
            if let Some(f) = &radices[k] {
                let (q, digit) = rest.div_rem(f);
                h[k] = digit;
                rest = q;
            }
        }
        let mut inf_values = Vec::with_capacity(infinite.len());
        tuple_decode(&zinf, infinite.len(), &mut inf_values);
        for (k, v) in infinite.into_iter().zip(inf_values) {
            h[k] = v;
        }
        PairCode { h: FinSeq(h), d: BitSeq(d) }
    }

    /// Per-coordinate finite radix (`None` for `F(k) = ∞`) and the infinite coordinates.
    fn split_level(&self, l: usize) -> (Vec<Option<Nat>>, Vec<usize>) {
        let radices: Vec<Option<Nat>> =
            (0..l).map(|k| self.inner.spec.eval(k).as_finite().cloned()).collect();
        let infinite = (0..l).filter(|&k| radices[k].is_none()).collect();
        (radices, infinite)
    }

    fn finite_part_size(&self, radices: &[Option<Nat>], l: usize) -> Nat {
        radices.iter().flatten().fold(Nat::one() << l, |acc, f| acc * f)
    }
}

/// Big-endian binary rank: `d(0)` is the most significant bit.
fn bits_rank(d: &[bool]) -> Nat {
    d.iter().fold(Nat::zero(), |acc, &b| (acc << 1) + u32::from(b))
}

fn bits_unrank(r: &BigUint, l: usize) -> Vec<bool> {
    (0..l).map(|i| r.bit((l - 1 - i) as u64)).collect()
}

/// Result of the exhaustive appropriateness check.
#[derive(Clone, Debug, Serialize)]
pub struct AppropriatenessReport {
    pub level_bound: usize,
    /// Levels enumerated pair by pair.
    pub levels_enumerated: Vec<usize>,
    /// Finitely counted levels with `F(l) = ∞`, appropriate without enumeration.
    pub levels_unbounded: Vec<usize>,
    /// Levels with infinitely many pairs (appropriateness is vacuous there).
    pub levels_infinite: Vec<usize>,
    pub codes_checked: u64,
    pub witness: Option<AppropriatenessWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AppropriatenessWitness {
    pub pair: PairCode,
    #[serde(serialize_with = "crate::json::serialize_nat")]
    pub code: Nat,
    pub bound: ExtNat,
    pub reason: &'static str,
}

impl AppropriatenessReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Enumerates every pair of every finitely counted level `l ≤ level_bound`
/// and checks `#_F(p) < F(l)` together with contiguity of the level block.
pub fn verify_appropriate(
    codec: &PairCodec,
    level_bound: usize,
    budget: u64,
) -> Result<AppropriatenessReport> {
    let spec = codec.spec();
    let mut report = AppropriatenessReport {
        level_bound,
        levels_enumerated: vec![],
        levels_unbounded: vec![],
        levels_infinite: vec![],
        codes_checked: 0,
        witness: None,
    };
    for l in 0..=level_bound {
        if !codec.level_is_finite(l) {
            report.levels_infinite.push(l);
            continue;
        }
        let bound = spec.eval(l);
        if !bound.is_finite() {
            report.levels_unbounded.push(l);
            continue;
        }
        let count = level_count(spec, l);
        let count = count
            .as_finite()
            .and_then(|c| c.to_u64())
            .filter(|&c| report.codes_checked + c <= budget)
            .ok_or(Error::BudgetExceeded { budget })?;
        let radices: Vec<u64> = (0..l)
            .map(|k| spec.eval(k).as_finite().and_then(|f| f.to_u64()).expect("bounded by count"))
            .collect();
        let offset = codec.offset(l);
        let mut digits = vec![0u64; l];
        for idx in 0..count {
            // idx = hrank·2^l + drank, unranked by hand to stay off the codec's path.
            let mut hrank = idx >> l;
            for k in (0..l).rev() {
                digits[k] = hrank % radices[k];
                hrank /= radices[k];
            }
            let h: Vec<Nat> = digits.iter().map(|&x| Nat::from(x)).collect();
            let d: Vec<bool> = (0..l).map(|i| (idx >> (l - 1 - i)) & 1 == 1).collect();
            let code = codec.rank_code(&h, &d)?;
            report.codes_checked += 1;
            let reason = if code != &offset + idx {
                Some("level block is not contiguous")
            } else if !bound.admits(&code) {
                Some("code is not below F(level)")
            } else {
                None
            };
            if let Some(reason) = reason {
                report.witness = Some(AppropriatenessWitness {
                    pair: PairCode { h: FinSeq(h), d: BitSeq(d) },
                    code,
                    bound,
                    reason,
                });
                return Ok(report);
            }
        }
        report.levels_enumerated.push(l);
    }
    Ok(report)
}
