//! Bound functions `F: ℕ → (ℕ∖{0}) ∪ {∞}` given as a finite prefix plus a tail rule.
//!
//! The tail rules are restricted so that `liminf F` and `lim F` are decidable,
//! which is what the regime classification and the reindexing search need.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Unbounded natural number. Codes and level counts overflow any fixed width.
pub type Nat = BigUint;

/// A natural number or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Fin(Nat),
    Inf,
}

impl ExtNat {
    pub fn fin(v: impl Into<Nat>) -> Self {
        ExtNat::Fin(v.into())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtNat::Fin(_))
    }

    pub fn as_finite(&self) -> Option<&Nat> {
        match self {
            ExtNat::Fin(v) => Some(v),
            ExtNat::Inf => None,
        }
    }

    /// `v < self`, i.e. `v` is an admissible value under this bound.
    pub fn admits(&self, v: &Nat) -> bool {
        match self {
            ExtNat::Fin(b) => v < b,
            ExtNat::Inf => true,
        }
    }

    pub fn pow2(l: usize) -> Self {
        ExtNat::Fin(Nat::one() << l)
    }
}

impl From<u64> for ExtNat {
    fn from(v: u64) -> Self {
        ExtNat::Fin(Nat::from(v))
    }
}

impl From<Nat> for ExtNat {
    fn from(v: Nat) -> Self {
        ExtNat::Fin(v)
    }
}

impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.cmp(b),
            (ExtNat::Fin(_), ExtNat::Inf) => Ordering::Less,
            (ExtNat::Inf, ExtNat::Fin(_)) => Ordering::Greater,
            (ExtNat::Inf, ExtNat::Inf) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: &ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a + b),
            _ => ExtNat::Inf,
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: ExtNat) -> ExtNat {
        &self + &rhs
    }
}

// Cardinal arithmetic: 0 · ∞ = 0. Bound values are never 0, so counts built
// from them never hit that case.
impl Mul for &ExtNat {
    type Output = ExtNat;
    fn mul(self, rhs: &ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a * b),
            (ExtNat::Fin(z), ExtNat::Inf) | (ExtNat::Inf, ExtNat::Fin(z)) if z.is_zero() => {
                ExtNat::Fin(Nat::zero())
            }
            _ => ExtNat::Inf,
        }
    }
}

impl Mul for ExtNat {
    type Output = ExtNat;
    fn mul(self, rhs: ExtNat) -> ExtNat {
        &self * &rhs
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(v) => write!(f, "{v}"),
            ExtNat::Inf => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtNat::Fin(v) => crate::json::serialize_nat(v, s),
            ExtNat::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtNat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtNat::from(v)),
            Raw::Str(s) if s == "inf" => Ok(ExtNat::Inf),
            Raw::Str(s) => s
                .parse::<Nat>()
                .map(ExtNat::Fin)
                .map_err(|_| serde::de::Error::custom(format!("expected a natural or \"inf\", got {s:?}"))),
        }
    }
}

/// How `F` continues past its explicit prefix. Rules are applied to the
/// absolute index `n`, not to the offset past the prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TailRule {
    Constant { value: ExtNat },
    Infinity,
    /// `F(n) = a·n + b`
    Affine {
        #[serde(serialize_with = "crate::json::serialize_nat", deserialize_with = "crate::json::deserialize_nat")]
        a: Nat,
        #[serde(serialize_with = "crate::json::serialize_nat", deserialize_with = "crate::json::deserialize_nat")]
        b: Nat,
    },
    /// `F(n) = pattern[n mod len]`
    Periodic { pattern: Vec<ExtNat> },
}

impl TailRule {
    fn eval(&self, n: usize) -> ExtNat {
        match self {
            TailRule::Constant { value } => value.clone(),
            TailRule::Infinity => ExtNat::Inf,
            TailRule::Affine { a, b } => ExtNat::Fin(a * Nat::from(n) + b),
            TailRule::Periodic { pattern } => pattern[n % pattern.len()].clone(),
        }
    }
}

#[derive(Deserialize)]
struct RawBoundSpec {
    #[serde(default)]
    prefix: Vec<ExtNat>,
    tail: TailRule,
}

/// A bound function `F` with `F(n) ≥ 1` everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBoundSpec")]
pub struct BoundSpec {
    prefix: Vec<ExtNat>,
    tail: TailRule,
}

impl TryFrom<RawBoundSpec> for BoundSpec {
    type Error = Error;
    fn try_from(raw: RawBoundSpec) -> Result<Self> {
        BoundSpec::new(raw.prefix, raw.tail)
    }
}

impl BoundSpec {
    pub fn new(prefix: Vec<ExtNat>, tail: TailRule) -> Result<Self> {
        let zero = ExtNat::Fin(Nat::zero());
        if let Some(i) = prefix.iter().position(|v| *v == zero) {
            return Err(Error::InvalidSpec(format!("F({i}) = 0")));
        }
        match &tail {
            TailRule::Constant { value } if *value == zero => {
                return Err(Error::InvalidSpec("constant tail must be at least 1".into()));
            }
            TailRule::Affine { a, b } => {
                // Minimum over the tail region is at n = prefix.len().
                if (a * Nat::from(prefix.len()) + b).is_zero() {
                    return Err(Error::InvalidSpec(format!(
                        "affine tail is 0 at n = {}",
                        prefix.len()
                    )));
                }
            }
            TailRule::Periodic { pattern } => {
                if pattern.is_empty() {
                    return Err(Error::InvalidSpec("periodic pattern is empty".into()));
                }
                if pattern.contains(&zero) {
                    return Err(Error::InvalidSpec("periodic pattern contains 0".into()));
                }
            }
            _ => {}
        }
        Ok(BoundSpec { prefix, tail })
    }

    /// Convenience constructor: finite prefix values, all other values `∞`.
    pub fn finite_prefix(prefix: &[u64]) -> Result<Self> {
        Self::new(prefix.iter().map(|&v| ExtNat::from(v)).collect(), TailRule::Infinity)
    }

    /// `F(n) = a·n + b` everywhere.
    pub fn affine(a: u64, b: u64) -> Result<Self> {
        Self::new(vec![], TailRule::Affine { a: a.into(), b: b.into() })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn prefix(&self) -> &[ExtNat] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// `F(n)`.
    pub fn eval(&self, n: usize) -> ExtNat {
        match self.prefix.get(n) {
            Some(v) => v.clone(),
            None => self.tail.eval(n),
        }
    }

    pub fn admits(&self, n: usize, v: &Nat) -> bool {
        match self.prefix.get(n) {
            Some(b) => b.admits(v),
            None => self.tail.eval(n).admits(v),
        }
    }

    /// Least `n` with `F(n) = ∞`.
    pub fn first_infinite_index(&self) -> Option<usize> {
        if let Some(i) = self.prefix.iter().position(|v| !v.is_finite()) {
            return Some(i);
        }
        let p = self.prefix.len();
        match &self.tail {
            TailRule::Infinity | TailRule::Constant { value: ExtNat::Inf } => Some(p),
            TailRule::Constant { .. } | TailRule::Affine { .. } => None,
            TailRule::Periodic { pattern } => {
                (p..p + pattern.len()).find(|&n| !pattern[n % pattern.len()].is_finite())
            }
        }
    }

    /// Checks that `g` lies in `∏_{k<len} F(k)`.
    pub fn check_sequence(&self, g: &[Nat]) -> Result<()> {
        for (i, v) in g.iter().enumerate() {
            if !self.admits(i, v) {
                return Err(Error::OutOfBounds { index: i, value: v.clone() });
            }
        }
        Ok(())
    }

    /// Least `n₀` such that `F(n) > k` for every `n ≥ n₀`.
    pub fn eventually_exceeds(&self, k: &Nat) -> Option<usize> {
        let p = self.prefix.len();
        let above = |v: &ExtNat| v.admits(k);
        let tail_start = match &self.tail {
            TailRule::Infinity => p,
            TailRule::Constant { value } => {
                if above(value) {
                    p
                } else {
                    return None;
                }
            }
            TailRule::Affine { a, b } => {
                if a.is_zero() {
                    if b > k {
                        p
                    } else {
                        return None;
                    }
                } else if b > k {
                    p
                } else {
                    // a·n + b > k  ⇔  n > (k − b)/a
                    let n = (k - b) / a + 1u32;
                    p.max(n.to_usize()?)
                }
            }
            TailRule::Periodic { pattern } => {
                if pattern.iter().all(above) {
                    p
                } else {
                    return None;
                }
            }
        };
        // Walk back through the prefix while values stay above k.
        let mut start = tail_start;
        if start == p {
            while start > 0 && above(&self.prefix[start - 1]) {
                start -= 1;
            }
        }
        Some(start)
    }

    /// Least `n ≥ from` with `F(n) ≥ threshold`, and `F(n) < ∞` when
    /// `finite_only` is set. `None` when no such index exists.
    fn least_index_at_least(
        &self,
        from: usize,
        threshold: &ExtNat,
        finite_only: bool,
    ) -> Option<Nat> {
        let ok = |v: &ExtNat| v >= threshold && (!finite_only || v.is_finite());
        let p = self.prefix.len();
        if let Some(n) = (from..p).find(|&n| ok(&self.prefix[n])) {
            return Some(n.into());
        }
        let start = from.max(p);
        match &self.tail {
            TailRule::Infinity => (!finite_only).then(|| start.into()),
            TailRule::Constant { value } => ok(value).then(|| start.into()),
            TailRule::Affine { a, b } => {
                let t = threshold.as_finite()?;
                let start = Nat::from(start);
                if a.is_zero() {
                    return (b >= t).then_some(start);
                }
                // a·n + b ≥ t  ⇔  n ≥ ⌈(t − b)/a⌉
                let need = if b >= t { Nat::zero() } else { Integer::div_ceil(&(t - b), a) };
                Some(need.max(start))
            }
            TailRule::Periodic { pattern } => (start..start + pattern.len())
                .find(|&n| ok(&pattern[n % pattern.len()]))
                .map(Nat::from),
        }
    }
}

/// Outcome of the growth-condition check up to some index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub up_to: usize,
    /// `Σ_{l≤n} |∏_{k<l} F(k)|·2^l` for each `n ≤ up_to`.
    pub sums: Vec<ExtNat>,
    pub first_failure: Option<usize>,
}

impl GrowthReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks `Σ_{l≤n} |∏_{k<l} F(k)|·2^l ≤ F(n)` for every `n ≤ up_to`.
pub fn check_growth(spec: &BoundSpec, up_to: usize) -> GrowthReport {
    let mut product = ExtNat::from(1);
    let mut sum = ExtNat::from(0);
    let mut sums = Vec::with_capacity(up_to + 1);
    let mut first_failure = None;
    for n in 0..=up_to {
        sum = &sum + &(&product * &ExtNat::pow2(n));
        if first_failure.is_none() && sum > spec.eval(n) {
            first_failure = Some(n);
        }
        sums.push(sum.clone());
        product = &product * &spec.eval(n);
    }
    GrowthReport { up_to, sums, first_failure }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum RegimeClass {
    /// `liminf F = m < ∞`; `m` is attained infinitely often.
    LiminfFinite {
        #[serde(serialize_with = "crate::json::serialize_nat")]
        m: Nat,
    },
    /// `lim F = ∞`.
    LimInfinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Regime {
    #[serde(flatten)]
    pub class: RegimeClass,
    /// `F(n) < ∞` for infinitely many `n`; decides whether a compact family exists.
    pub finite_infinitely_often: bool,
}

impl Regime {
    pub fn lim_infinite(&self) -> bool {
        self.class == RegimeClass::LimInfinite
    }

    pub fn liminf(&self) -> Option<&Nat> {
        match &self.class {
            RegimeClass::LiminfFinite { m } => Some(m),
            RegimeClass::LimInfinite => None,
        }
    }

    /// `lim F = ∞` together with `F(n) < ∞` infinitely often.
    pub fn mixed_compactable(&self) -> bool {
        self.lim_infinite() && self.finite_infinitely_often
    }
}

/// Classifies `F` by its tail rule. Every tail rule has a decidable
/// `liminf`, so this never fails.
pub fn classify_regime(spec: &BoundSpec) -> Regime {
    let finite_min = |pattern: &[ExtNat]| pattern.iter().filter_map(ExtNat::as_finite).min().cloned();
    let (class, finite_io) = match spec.tail() {
        TailRule::Infinity | TailRule::Constant { value: ExtNat::Inf } => {
            (RegimeClass::LimInfinite, false)
        }
        TailRule::Constant { value: ExtNat::Fin(k) } => {
            (RegimeClass::LiminfFinite { m: k.clone() }, true)
        }
        TailRule::Affine { a, b } if a.is_zero() => {
            (RegimeClass::LiminfFinite { m: b.clone() }, true)
        }
        TailRule::Affine { .. } => (RegimeClass::LimInfinite, true),
        TailRule::Periodic { pattern } => match finite_min(pattern) {
            Some(m) => (RegimeClass::LiminfFinite { m }, true),
            None => (RegimeClass::LimInfinite, false),
        },
    };
    Regime { class, finite_infinitely_often: finite_io }
}

/// `{n ≤ up_to : F(n) < ∞}`.
pub fn finite_support_set(spec: &BoundSpec, up_to: usize) -> Vec<usize> {
    (0..=up_to).filter(|&n| spec.eval(n).is_finite()).collect()
}

/// The strictly increasing coordinate sequence `e_0 < e_1 < …` onto which
/// the growth condition is transported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReindexSeq {
    pub entries: Vec<usize>,
    pub restrict_to_finite: bool,
}

impl ReindexSeq {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Some(m)` when `n = e_m`.
    pub fn index_of(&self, n: usize) -> Option<usize> {
        self.entries.binary_search(&n).ok()
    }

    /// `|E ∩ [0, n)|`.
    pub fn count_below(&self, n: usize) -> usize {
        self.entries.partition_point(|&e| e < n)
    }

    /// `F ∘ e` on the computed entries. The tail is `∞`, so the result is
    /// only meaningful at indices below `self.len()`.
    pub fn composed_spec(&self, spec: &BoundSpec) -> BoundSpec {
        BoundSpec {
            prefix: self.entries.iter().map(|&e| spec.eval(e)).collect(),
            tail: TailRule::Infinity,
        }
    }
}

/// Computes `e_0, …, e_{count−1}` by minimal choice: `e_m` is the least
/// admissible index above `e_{m−1}` with
/// `F(e_m) ≥ Σ_{l≤m} |∏_{k<l} F(e_k)|·2^l`.
///
/// With `restrict_to_finite` every entry is drawn from `{n : F(n) < ∞}` and
/// `e_0` is the least such index.
pub fn reindex_sequence(
    spec: &BoundSpec,
    count: usize,
    restrict_to_finite: bool,
    scan_bound: usize,
) -> Result<ReindexSeq> {
    let regime = classify_regime(spec);
    if !regime.lim_infinite() {
        return Err(Error::RegimeViolation("reindexing needs lim F = ∞".into()));
    }
    if restrict_to_finite && !regime.finite_infinitely_often {
        return Err(Error::RegimeViolation(
            "compact reindexing needs F(n) < ∞ infinitely often".into(),
        ));
    }
    let mut entries: Vec<usize> = Vec::with_capacity(count);
    let mut product = ExtNat::from(1);
    let mut sum = ExtNat::from(0);
    for m in 0..count {
        sum = &sum + &(&product * &ExtNat::pow2(m));
        let from = entries.last().map_or(0, |&e| e + 1);
        // e_0 = 0 in the general case; the sum at m = 0 is 1 ≤ F(0) anyway.
        let threshold = if m == 0 && !restrict_to_finite { ExtNat::from(0) } else { sum.clone() };
        let found = spec
            .least_index_at_least(from, &threshold, restrict_to_finite)
            .ok_or_else(|| {
                Error::RegimeViolation(format!("no index satisfies the growth bound for e_{m}"))
            })?;
        let n = found
            .to_usize()
            .filter(|&n| n <= scan_bound)
            .ok_or(Error::ScanBoundExceeded { bound: scan_bound })?;
        product = &product * &spec.eval(n);
        entries.push(n);
    }
    Ok(ReindexSeq { entries, restrict_to_finite })
}

/// One of the constant functions of the finite family used when
/// `liminf F < ∞`. Values are clamped to `F(n) − 1` on the finitely many
/// coordinates where `F(n) ≤ k`, so the function stays inside `∏ F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantFunction {
    #[serde(serialize_with = "crate::json::serialize_nat")]
    pub value: Nat,
}

impl ConstantFunction {
    pub fn at(&self, spec: &BoundSpec, n: usize) -> Nat {
        match spec.eval(n) {
            ExtNat::Fin(b) if b <= self.value => b - 1u32,
            _ => self.value.clone(),
        }
    }

    pub fn prefix(&self, spec: &BoundSpec, len: usize) -> Vec<Nat> {
        (0..len).map(|n| self.at(spec, n)).collect()
    }
}

/// The constant functions `c_0, …, c_{m−1}` for `m = liminf F`.
pub fn constant_medf(spec: &BoundSpec) -> Result<Vec<ConstantFunction>> {
    let regime = classify_regime(spec);
    let m = regime
        .liminf()
        .ok_or_else(|| Error::RegimeViolation("constant family needs liminf F < ∞".into()))?;
    let m = m
        .to_u64()
        .ok_or_else(|| Error::Precondition("liminf too large to enumerate".into()))?;
    Ok((0..m).map(|k| ConstantFunction { value: k.into() }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inf() -> ExtNat {
        ExtNat::Inf
    }

    fn periodic(p: Vec<ExtNat>) -> BoundSpec {
        BoundSpec::new(vec![], TailRule::Periodic { pattern: p }).unwrap()
    }

    fn constant(k: u64) -> BoundSpec {
        BoundSpec::new(vec![], TailRule::Constant { value: k.into() }).unwrap()
    }

    #[test]
    fn extnat_order_and_arithmetic() {
        assert!(ExtNat::from(10) < inf());
        assert!(inf() <= inf());
        assert_eq!(ExtNat::from(2) + inf(), inf());
        assert_eq!(ExtNat::from(3) * ExtNat::from(4), ExtNat::from(12));
        assert_eq!(ExtNat::from(3) * inf(), inf());
    }

    #[test]
    fn eval_bound_examples() {
        let s = BoundSpec::finite_prefix(&[2, 5, 45]).unwrap();
        assert_eq!(s.eval(1), ExtNat::from(5));
        assert_eq!(s.eval(7), inf());
        assert_eq!(BoundSpec::affine(1, 1).unwrap().eval(10), ExtNat::from(11));
    }

    #[test]
    fn rejects_zero_values() {
        assert!(BoundSpec::finite_prefix(&[1, 0]).is_err());
        assert!(BoundSpec::affine(1, 0).is_err());
        assert!(BoundSpec::new(vec![1.into()], TailRule::Affine { a: 1u32.into(), b: 0u32.into() }).is_ok());
        assert!(BoundSpec::new(vec![], TailRule::Periodic { pattern: vec![] }).is_err());
        assert!(BoundSpec::new(vec![], TailRule::Constant { value: 0.into() }).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = BoundSpec::from_json(r#"{"prefix": [2,5,45], "tail": {"kind":"infinity"}}"#).unwrap();
        assert_eq!(s, BoundSpec::finite_prefix(&[2, 5, 45]).unwrap());
        let p = BoundSpec::from_json(r#"{"prefix": [], "tail": {"kind":"periodic","pattern":[2,"inf"]}}"#)
            .unwrap();
        assert_eq!(p.eval(3), inf());
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(BoundSpec::from_json(&back).unwrap(), p);
        assert!(BoundSpec::from_json(r#"{"prefix": [0], "tail": {"kind":"infinity"}}"#).is_err());
        assert!(BoundSpec::from_json(r#"{"tail": {"kind":"weird"}}"#).is_err());
    }

    #[test]
    fn growth_examples() {
        let r = check_growth(&BoundSpec::finite_prefix(&[1, 3, 15]).unwrap(), 2);
        assert!(r.passed());
        assert_eq!(r.sums, vec![ExtNat::from(1), ExtNat::from(3), ExtNat::from(15)]);
        let r = check_growth(&BoundSpec::finite_prefix(&[2, 5, 45]).unwrap(), 2);
        assert!(r.passed());
        assert_eq!(r.sums, vec![ExtNat::from(1), ExtNat::from(5), ExtNat::from(45)]);
        let r = check_growth(&BoundSpec::affine(1, 1).unwrap(), 1);
        assert_eq!(r.first_failure, Some(1));
        // Past the prefix of [2,5,45] everything is ∞ and the check keeps passing.
        assert!(check_growth(&BoundSpec::finite_prefix(&[2, 5, 45]).unwrap(), 8).passed());
    }

    #[test]
    fn regime_examples() {
        assert_eq!(classify_regime(&constant(3)).liminf(), Some(&Nat::from(3u32)));
        let affine10 =
            BoundSpec::new(vec![1.into()], TailRule::Affine { a: 1u32.into(), b: 0u32.into() }).unwrap();
        let r = classify_regime(&affine10);
        assert!(r.lim_infinite());
        assert!(r.mixed_compactable());
        let r = classify_regime(&periodic(vec![2.into(), inf()]));
        assert_eq!(r.liminf(), Some(&Nat::from(2u32)));
        assert!(r.finite_infinitely_often);
        let r = classify_regime(&BoundSpec::finite_prefix(&[]).unwrap());
        assert!(r.lim_infinite() && !r.finite_infinitely_often);
    }

    #[test]
    fn liminf_value_recurs() {
        // The classified liminf must actually be attained over and over.
        for spec in [constant(3), periodic(vec![5.into(), inf(), 2.into()])] {
            let m = classify_regime(&spec).liminf().cloned().unwrap();
            let hits = (0..300).filter(|&n| spec.eval(n) == ExtNat::Fin(m.clone())).count();
            assert!(hits >= 50, "{hits}");
        }
    }

    #[test]
    fn finite_support_examples() {
        assert_eq!(finite_support_set(&periodic(vec![2.into(), inf()]), 5), vec![0, 2, 4]);
        assert!(finite_support_set(&BoundSpec::finite_prefix(&[]).unwrap(), 5).is_empty());
        let s = BoundSpec::new(vec![3.into()], TailRule::Constant { value: 7.into() }).unwrap();
        assert_eq!(finite_support_set(&s, 2), vec![0, 1, 2]);
    }

    #[test]
    fn reindex_examples() {
        let s = BoundSpec::affine(1, 1).unwrap();
        assert_eq!(reindex_sequence(&s, 3, false, 1 << 20).unwrap().entries, vec![0, 2, 14]);
        assert_eq!(reindex_sequence(&s, 4, false, 1 << 20).unwrap().entries, vec![0, 2, 14, 374]);
        let all_inf = BoundSpec::finite_prefix(&[]).unwrap();
        assert_eq!(reindex_sequence(&all_inf, 3, false, 100).unwrap().entries, vec![0, 1, 2]);
    }

    #[test]
    fn reindex_errors() {
        assert!(matches!(
            reindex_sequence(&constant(3), 2, false, 100),
            Err(Error::RegimeViolation(_))
        ));
        assert!(matches!(
            reindex_sequence(&BoundSpec::finite_prefix(&[]).unwrap(), 2, true, 100),
            Err(Error::RegimeViolation(_))
        ));
        assert!(matches!(
            reindex_sequence(&BoundSpec::affine(1, 1).unwrap(), 4, false, 100),
            Err(Error::ScanBoundExceeded { bound: 100 })
        ));
    }

    #[test]
    fn compact_reindex_stays_in_finite_support() {
        // F = (∞, 1, ∞, 2, 5, 6, 7, …)
        let s = BoundSpec::new(
            vec![inf(), 1.into(), inf(), 2.into()],
            TailRule::Affine { a: 1u32.into(), b: 1u32.into() },
        )
        .unwrap();
        let e = reindex_sequence(&s, 4, true, 1 << 20).unwrap();
        assert_eq!(e.entries, vec![1, 4, 22, 942]);
        assert!(e.entries.iter().all(|&n| s.eval(n).is_finite()));
    }

    #[test]
    fn eventually_exceeds_examples() {
        let s = BoundSpec::affine(1, 1).unwrap();
        assert_eq!(s.eventually_exceeds(&Nat::from(3u32)), Some(3));
        assert_eq!(s.eventually_exceeds(&Nat::from(0u32)), Some(0));
        let p = BoundSpec::finite_prefix(&[2, 5, 1]).unwrap();
        assert_eq!(p.eventually_exceeds(&Nat::from(1u32)), Some(3));
        assert_eq!(constant(3).eventually_exceeds(&Nat::from(3u32)), None);
    }

    #[test]
    fn constant_family_examples() {
        assert_eq!(constant_medf(&constant(3)).unwrap().len(), 3);
        assert_eq!(constant_medf(&periodic(vec![2.into(), inf()])).unwrap().len(), 2);
        assert_eq!(constant_medf(&constant(1)).unwrap().len(), 1);
        assert!(constant_medf(&BoundSpec::affine(1, 1).unwrap()).is_err());
        // Clamped below a small prefix value.
        let s = BoundSpec::new(vec![1.into()], TailRule::Constant { value: 3.into() }).unwrap();
        let c2 = &constant_medf(&s).unwrap()[2];
        assert_eq!(c2.prefix(&s, 3), vec![Nat::from(0u32), 2u32.into(), 2u32.into()]);
    }
}
