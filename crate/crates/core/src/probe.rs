//! Bounded search for family members that agree often with a given prefix.
//!
//! The dichotomy behind maximality quantifies over infinite sets. Here every
//! quantifier runs over values below the prefix length `H = len(g)`, so the
//! outcome is only ever a finite witness, a refutation below `H`, or nothing.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::{classify_regime, BoundSpec, Nat};
use crate::coding::{encode_seq, BitSeq, FinSeq, PairCodec};
use crate::construction::{is_good, marked_class, order_rel, residue_member, ConstructionContext};
use crate::error::{Error, Result};

/// Where the 1-positions of `c` are drawn from in the greedy construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// `n_k ∈ I_g[c̄_k]`: the 1 is placed at a marked value.
    #[default]
    Literal,
    /// `n_k ∈ I_{c̄_k}`: the 1 is placed at an index, and the conditions are
    /// evaluated at its mark `2·#(g↾n_k)`.
    Direct,
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Strategy::Literal),
            "direct" => Ok(Strategy::Direct),
            other => Err(Error::Precondition(format!("unknown strategy {other:?}"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Literal => "literal",
            Strategy::Direct => "direct",
        })
    }
}

/// `c̄ ⌢ 0^{n − len(c̄)} ⌢ 1`; requires `n ≥ len(c̄)`.
fn extend_with_one(c: &[bool], n: usize) -> Vec<bool> {
    let mut out = c.to_vec();
    out.resize(n, false);
    out.push(true);
    out
}

/// `c` restricted or zero-padded to length `n`.
fn padded(c: &[bool], n: usize) -> Vec<bool> {
    let mut out = c[..c.len().min(n)].to_vec();
    out.resize(n, false);
    out
}

fn e_value(codec: &PairCodec, g: &[Nat], c: &[bool], n: usize) -> Option<Nat> {
    codec.encode(&g[..n], &padded(c, n)).ok()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Case1Witness {
    pub stem: BitSeq,
    /// `⊲_g`-increasing positions inside `I_g[stem]`.
    pub chain: Vec<usize>,
    pub h: FinSeq,
    pub d: BitSeq,
    pub stems_tried: usize,
    /// Marks `n₀ < len(stem)` that could not be extended and were skipped.
    pub skipped_short: usize,
    /// Positions `n₀` for which no candidate `n₁` was below the horizon.
    pub undecided: usize,
}

enum StemVerdict {
    Refuted,
    Holds { undecided: usize, skipped: usize },
}

fn check_stem(codec: &PairCodec, g: &[Nat], stem: &[bool]) -> StemVerdict {
    let h = g.len();
    let mut undecided = 0;
    let mut skipped = 0;
    let mut checked = 0;
    for n0 in marked_class(g, stem, h) {
        if n0 < stem.len() {
            skipped += 1;
            continue;
        }
        let c1 = extend_with_one(stem, n0);
        if e_value(codec, g, &c1, n0).is_some_and(|v| v == g[n0]) {
            return StemVerdict::Refuted;
        }
        let later: Vec<usize> = marked_class(g, &c1, h).into_iter().filter(|&n1| n1 > n0).collect();
        if later.iter().any(|&n1| order_rel(codec, g, n0, n1)) {
            checked += 1;
        } else if later.is_empty() {
            undecided += 1;
        } else {
            return StemVerdict::Refuted;
        }
    }
    if checked == 0 {
        return StemVerdict::Refuted;
    }
    StemVerdict::Holds { undecided, skipped }
}

/// Stems of `C` (empty, or ending in 1) up to length `max_stem`, shortest first.
fn stems(max_stem: usize) -> impl Iterator<Item = Vec<bool>> {
    std::iter::once(vec![]).chain((1..=max_stem).flat_map(|len| {
        (0..1u64 << (len - 1)).map(move |bits| {
            let mut s: Vec<bool> = (0..len - 1).map(|i| bits >> i & 1 == 1).collect();
            s.push(true);
            s
        })
    }))
}

/// Looks for a stem `c̄ ∈ C` satisfying the first case below the horizon and
/// builds a `⊲_g`-chain inside `I_g[c̄]`. The pair recovered from the last
/// chain element is padded with zeros to the horizon.
pub fn case1_search(codec: &PairCodec, g: &[Nat], max_stem: usize) -> Option<Case1Witness> {
    let h = g.len();
    for (tried, stem) in stems(max_stem).enumerate() {
        let tried = tried + 1;
        let StemVerdict::Holds { undecided, skipped } = check_stem(codec, g, &stem) else {
            continue;
        };
        let class: Vec<usize> = marked_class(g, &stem, h).into_iter().filter(|&n| n >= stem.len()).collect();
        let Some(&first) = class.first() else { continue };
        let mut chain = vec![first];
        for &n in &class[1..] {
            if order_rel(codec, g, *chain.last().unwrap(), n) {
                chain.push(n);
            }
        }
        if chain.len() < 2 {
            continue;
        }
        let top = codec.decode(&g[*chain.last().unwrap()]);
        let mut hs = top.h.0;
        hs.resize(h, Nat::from(0u32));
        let d = padded(&top.d, h);
        return Some(Case1Witness {
            stem: BitSeq(stem),
            chain,
            h: FinSeq(hs),
            d: BitSeq(d),
            stems_tried: tried,
            skipped_short: skipped,
            undecided,
        });
    }
    None
}

/// Which part of the disjunction admitted a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepReason {
    /// `g(n) = #_F(g↾n, c̄↾n)`.
    Coded,
    /// No `⊲_g`-successor below the horizon.
    NoSuccessor,
    /// The position to evaluate lies at or past the horizon.
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Case2Step {
    /// New 1-position of `c`.
    pub position: usize,
    /// Position where the disjunction was evaluated.
    pub evaluated_at: Option<usize>,
    pub reason: StepReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Case2Result {
    pub strategy: Strategy,
    pub c: BitSeq,
    pub steps: Vec<Case2Step>,
    pub good: bool,
    pub marked: Vec<usize>,
    /// A `⊲_g`-comparable pair inside `ν(g,c)`, if one exists below the horizon.
    pub comparable_pair: Option<(usize, usize)>,
    pub member: FinSeq,
    pub agreements: Vec<usize>,
}

/// Evaluates the second-case disjunction at position `n0` for the extended stem `c1`.
fn disjunction(codec: &PairCodec, g: &[Nat], c1: &[bool], n0: usize) -> Option<StepReason> {
    if n0 >= g.len() {
        return Some(StepReason::Undecided);
    }
    if e_value(codec, g, c1, n0).is_some_and(|v| v == g[n0]) {
        return Some(StepReason::Coded);
    }
    let blocked = marked_class(g, c1, g.len()).into_iter().any(|n1| order_rel(codec, g, n0, n1));
    (!blocked).then_some(StepReason::NoSuccessor)
}

/// Greedy construction of `c` for the second case: starting from `c̄₀ = ∅`,
/// repeatedly append `0…01` ending at the least admissible position.
pub fn case2_greedy(codec: &PairCodec, g: &[Nat], strategy: Strategy) -> Result<Case2Result> {
    let h = g.len();
    let mut c: Vec<bool> = Vec::new();
    let mut steps = Vec::new();
    loop {
        let candidates: Vec<usize> = match strategy {
            Strategy::Literal => marked_class(g, &c, h).into_iter().filter(|&n| n >= c.len()).collect(),
            Strategy::Direct => (c.len()..h).filter(|&n| residue_member(n, &c)).collect(),
        };
        let step = candidates.into_iter().find_map(|n| {
            let c1 = extend_with_one(&c, n);
            let at = match strategy {
                Strategy::Literal => n,
                Strategy::Direct => {
                    let mark = encode_seq(&g[..n]) << 1u32;
                    usize::try_from(mark).unwrap_or(usize::MAX)
                }
            };
            disjunction(codec, g, &c1, at).map(|reason| Case2Step {
                position: n,
                evaluated_at: (at < h).then_some(at),
                reason,
            })
        });
        match step {
            Some(s) => {
                c = extend_with_one(&c, s.position);
                steps.push(s);
            }
            None => break,
        }
    }
    let c = BitSeq(padded(&c, h));
    let ctx = ConstructionContext::new(codec.clone(), FinSeq(g.to_vec()), c.clone())?;
    let nu = ctx.marked_set()?;
    let marked: Vec<usize> = nu.iter().collect();
    let comparable_pair = marked
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| marked[i + 1..].iter().map(move |&b| (a, b)))
        .find(|&(a, b)| ctx.order_rel(a, b));
    let member = ctx.e_hat_prefix(h)?;
    let agreements = agreement_positions(&member, g);
    Ok(Case2Result {
        strategy,
        good: is_good(&c),
        c,
        steps,
        marked,
        comparable_pair,
        member,
        agreements,
    })
}

pub fn agreement_positions(a: &[Nat], b: &[Nat]) -> Vec<usize> {
    a.iter().zip(b).enumerate().filter(|(_, (x, y))| x == y).map(|(i, _)| i).collect()
}

/// Finds `(h, d)` with `ê(h,d)↾H = g` when `g` is itself a member prefix.
///
/// The largest odd position whose value decodes to a pair of matching
/// length fixes `(h, d)` below it; the few positions above are searched over
/// `h(j) ∈ {0, g(j)}`, `d(j) ∈ {0, 1}`.
pub fn recover_member(codec: &PairCodec, g: &[Nat]) -> Option<(FinSeq, BitSeq)> {
    const MAX_FREE: usize = 4;
    let h = g.len();
    let (mut base_h, mut base_d) = (Vec::new(), Vec::new());
    if let Some(m) = (1..h).rev().filter(|m| m % 2 == 1).find(|&m| codec.decode(&g[m]).level() == m) {
        let p = codec.decode(&g[m]);
        base_h = p.h.0;
        base_d = p.d.0;
    }
    let free = h - base_h.len();
    if free > MAX_FREE {
        return None;
    }
    for mask in 0..1u32 << (2 * free) {
        let mut hs = base_h.clone();
        let mut ds = base_d.clone();
        for (i, j) in (base_h.len()..h).enumerate() {
            let pick = mask >> (2 * i);
            hs.push(if pick & 1 == 1 { g[j].clone() } else { Nat::from(0u32) });
            ds.push(pick & 2 == 2);
        }
        let Ok(ctx) = ConstructionContext::new(codec.clone(), FinSeq(hs), BitSeq(ds)) else {
            continue;
        };
        if ctx.e_hat_prefix(h).is_ok_and(|f| f[..] == *g) {
            return Some((ctx.g().clone(), ctx.c().clone()));
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchSource {
    SelfMatch,
    Case1,
    Case2,
}

/// A family member prefix `ê(h,d)↾H` and where it agrees with the probe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Match {
    pub source: MatchSource,
    pub h: FinSeq,
    pub d: BitSeq,
    pub member: FinSeq,
    pub agreements: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Case1(Case1Witness),
    Case2(Case2Result),
    Inconclusive { horizon: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub horizon: usize,
    pub strategy: Strategy,
    pub min_agreements: usize,
    pub outcome: ProbeOutcome,
    /// Best candidate found, whether or not it reaches `min_agreements`.
    pub best: Option<Match>,
    pub found: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ProbeConfig {
    pub min_agreements: usize,
    pub strategy: Strategy,
    pub max_stem: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { min_agreements: 1, strategy: Strategy::Literal, max_stem: 4 }
    }
}

fn member_of(codec: &PairCodec, h: FinSeq, d: BitSeq, g: &[Nat], source: MatchSource) -> Result<Match> {
    let ctx = ConstructionContext::new(codec.clone(), h, d)?;
    let member = ctx.e_hat_prefix(ctx.len())?;
    let agreements = agreement_positions(&member, g);
    Ok(Match { source, h: ctx.g().clone(), d: ctx.c().clone(), member, agreements })
}

/// Runs the self-match, the first case and the greedy second case, and keeps
/// the member with the most agreements.
pub fn match_finder(codec: &PairCodec, g: &[Nat], config: ProbeConfig) -> Result<ProbeReport> {
    let h = g.len();
    let mut report = ProbeReport {
        horizon: h,
        strategy: config.strategy,
        min_agreements: config.min_agreements,
        outcome: ProbeOutcome::Inconclusive { horizon: h },
        best: None,
        found: false,
    };
    if h == 0 {
        return Ok(report);
    }
    codec.spec().check_sequence(g)?;
    let mut candidates = Vec::new();
    if let Some((hs, ds)) = recover_member(codec, g) {
        candidates.push(member_of(codec, hs, ds, g, MatchSource::SelfMatch)?);
    }
    if let Some(w) = case1_search(codec, g, config.max_stem) {
        candidates.push(member_of(codec, w.h.clone(), w.d.clone(), g, MatchSource::Case1)?);
        report.outcome = ProbeOutcome::Case1(w);
    } else {
        let r = case2_greedy(codec, g, config.strategy)?;
        candidates.push(Match {
            source: MatchSource::Case2,
            h: FinSeq(g.to_vec()),
            d: r.c.clone(),
            member: r.member.clone(),
            agreements: r.agreements.clone(),
        });
        report.outcome = ProbeOutcome::Case2(r);
    }
    // Stable: on ties the earlier source wins.
    report.best = candidates.into_iter().rev().max_by_key(|m| m.agreements.len());
    report.found = report.best.as_ref().is_some_and(|m| m.agreements.len() >= config.min_agreements);
    Ok(report)
}

/// `liminf F + 1`: that many functions cannot be pairwise eventually
/// different, since infinitely many coordinates offer only `liminf F` values.
pub fn pigeonhole_bound(spec: &BoundSpec) -> Option<Nat> {
    classify_regime(spec).liminf().map(|m| m + 1u32)
}

/// The largest number of coordinates on which some two of `seqs` agree.
pub fn max_pair_agreement<T: PartialEq>(seqs: &[Vec<T>]) -> usize {
    let mut best = 0;
    for i in 0..seqs.len() {
        for j in i + 1..seqs.len() {
            best = best.max(seqs[i].iter().zip(&seqs[j]).filter(|(a, b)| a == b).count());
        }
    }
    best
}
