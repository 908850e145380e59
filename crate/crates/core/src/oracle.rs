//! Brute-force verification suites.
//!
//! Each suite runs the operations under test through a [`Subject`] and checks
//! them against literal re-implementations from [`reference`] and against the
//! structural properties the construction relies on. Small spaces are
//! enumerated exhaustively; otherwise contexts are sampled from a fixed seed.
//! The first failure in enumeration order is reported.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{BoundSpec, ExtNat, Nat};
use crate::coding::{encode_seq, level_count, BitSeq, FinSeq, PairCodec};
use crate::construction::{residue_member, ConstructionContext, MarkedSet};
use crate::error::{Error, Result};
use crate::json::nats_value;
use crate::lift::LiftContext;
use crate::tree::Tree;

/// The operations a suite exercises. The default methods call the real
/// implementations; tests override single methods to check that a suite
/// notices the change.
pub trait Subject {
    fn e_prefix(&self, ctx: &ConstructionContext, upto: usize) -> Result<FinSeq> {
        ctx.e_prefix(upto)
    }

    fn marked_set(&self, ctx: &ConstructionContext) -> Result<MarkedSet> {
        ctx.marked_set()
    }

    fn e_hat_prefix(&self, ctx: &ConstructionContext, upto: usize) -> Result<FinSeq> {
        ctx.e_hat_prefix(upto)
    }

    fn tree_contains(&self, tree: &Tree, f: &[Nat]) -> bool {
        tree.contains(f)
    }

    fn lift_member_prefix(&self, lift: &LiftContext, f_on_e: &[Nat], upto: usize) -> Result<FinSeq> {
        lift.lift_member_prefix(f_on_e, upto)
    }

    fn lift_membership(&self, lift: &LiftContext, g: &[Nat]) -> bool {
        lift.lift_membership(g)
    }
}

/// The real implementations.
#[derive(Clone, Copy, Debug, Default)]
pub struct Standard;

impl Subject for Standard {}

/// Literal transcriptions of the definitions, written without the shortcuts
/// the main modules take (early stopping, latches, incremental codes).
pub mod reference {
    use super::*;

    /// `n ≡ Σ c(i)·2^i (mod 2^len(c))`, in big-integer arithmetic.
    pub fn residue(n: usize, c: &[bool]) -> bool {
        let modulus = Nat::from(1u32) << c.len();
        let target = c.iter().rev().fold(Nat::from(0u32), |acc, &b| (acc << 1u32) + u32::from(b));
        Nat::from(n) % modulus == target
    }

    pub fn is_good(c: &[bool]) -> bool {
        let ones: Vec<usize> = (0..c.len()).filter(|&i| c[i]).collect();
        ones.windows(2).all(|w| residue(w[1], &c[..w[0] + 1]))
    }

    pub fn order(codec: &PairCodec, g: &[Nat], n0: usize, n1: usize) -> bool {
        if !(n0 < n1 && n1 < g.len()) {
            return false;
        }
        let (a, b) = (codec.decode(&g[n0]), codec.decode(&g[n1]));
        a.h.len() == n0
            && b.h.len() == n1
            && a.h[..] == b.h[..n0]
            && a.d[..] == b.d[..n0]
    }

    /// `{2·#(g↾n) : n < N, c(n) = 1} ∖ {n < N : g(n) = #_F(g↾n, c↾n)}`, cut at `N`.
    pub fn marked_set(codec: &PairCodec, g: &[Nat], c: &[bool]) -> Result<BTreeSet<usize>> {
        let big_n = g.len();
        let mut marks = BTreeSet::new();
        for n in 0..big_n {
            if c[n] {
                let m = encode_seq(&g[..n]) * 2u32;
                if let Some(m) = m.to_usize().filter(|&m| m < big_n) {
                    marks.insert(m);
                }
            }
        }
        let mut out = BTreeSet::new();
        for m in marks {
            if g[m] != codec.encode(&g[..m], &c[..m])? {
                out.insert(m);
            }
        }
        Ok(out)
    }

    pub fn e_hat(codec: &PairCodec, g: &[Nat], c: &[bool]) -> Result<Vec<Nat>> {
        let nu = marked_set(codec, g, c)?;
        let mut out = Vec::with_capacity(g.len());
        for n in 0..g.len() {
            let below: Vec<usize> = nu.iter().copied().filter(|&m| m < n).collect();
            let comparable = below
                .iter()
                .any(|&a| below.iter().any(|&b| order(codec, g, a, b)));
            let e = codec.encode(&g[..n], &c[..n])?;
            let switch_back = !nu.contains(&n) || comparable || !is_good(&c[..n]);
            out.push(if switch_back { e } else { g[n].clone() });
        }
        Ok(out)
    }

    /// Lifted value at `n ∉ E`, scanning `m = n, n−1, …, 0` for the first
    /// code of `(g↾m)∘e` below `F(n)`.
    pub fn lift_value(spec: &BoundSpec, entries: &[usize], compact: bool, g: &[Nat], n: usize) -> Nat {
        if compact && n < entries[0] {
            return Nat::from(0u32);
        }
        for m in (0..=n).rev() {
            let s: Vec<Nat> = entries.iter().filter(|&&e| e < m).map(|&e| g[e].clone()).collect();
            let code = encode_seq(&s);
            if spec.eval(n).admits(&code) {
                return code;
            }
        }
        unreachable!("#∅ = 0 is below every F(n)")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Ad,
    Ed,
    Tree,
    Lift,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Ad, Suite::Ed, Suite::Tree, Suite::Lift];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub horizon: usize,
    pub seed: u64,
    /// Contexts (or context pairs) drawn in sampled mode.
    pub samples: usize,
    /// Largest context space enumerated exhaustively; also caps tree levels.
    pub budget: u64,
    /// Values drawn at coordinates with `F(n) = ∞`.
    pub value_cap: u64,
    /// Lift suite: reindex inside `{n : F(n) < ∞}`.
    pub compact: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { horizon: 3, seed: 0, samples: 1000, budget: 20_000, value_cap: 8, compact: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub spec: BoundSpec,
    pub horizon: usize,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub pass: bool,
    pub counterexample: Option<Value>,
    pub counts: BTreeMap<&'static str, u64>,
    /// Wall-clock time; left out of the JSON so reports are reproducible.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

struct Report {
    counts: BTreeMap<&'static str, u64>,
    counterexample: Option<Value>,
}

impl Report {
    fn new() -> Self {
        Report { counts: BTreeMap::new(), counterexample: None }
    }

    fn bump(&mut self, key: &'static str) {
        *self.counts.entry(key).or_default() += 1;
    }

    fn add(&mut self, key: &'static str, v: u64) {
        *self.counts.entry(key).or_default() += v;
    }

    fn fail(&mut self, v: Value) {
        if self.counterexample.is_none() {
            self.counterexample = Some(v);
        }
    }

    fn failed(&self) -> bool {
        self.counterexample.is_some()
    }
}

#[derive(Clone, Debug)]
struct Sample {
    g: FinSeq,
    c: BitSeq,
}

impl Sample {
    fn json(&self) -> Value {
        json!({ "g": nats_value(&self.g), "c": self.c.to_string() })
    }
}

/// All `(g, c)` of length `n` in lexicographic order (`g` first), when
/// every `F(k)`, `k < n`, is finite and the space fits in `budget`.
fn enumerate_contexts(spec: &BoundSpec, n: usize, budget: u64) -> Option<Vec<Sample>> {
    let total = level_count(spec, n).as_finite()?.to_u64()?;
    if total > budget {
        return None;
    }
    let radices: Vec<u64> = (0..n).map(|k| spec.eval(k).as_finite().and_then(|f| f.to_u64())).collect::<Option<_>>()?;
    let mut out = Vec::with_capacity(total as usize);
    let g_count: u64 = radices.iter().product();
    for gi in 0..g_count {
        let mut r = gi;
        let mut g = vec![Nat::from(0u32); n];
        for k in (0..n).rev() {
            g[k] = Nat::from(r % radices[k]);
            r /= radices[k];
        }
        for ci in 0..1u64 << n {
            let c: Vec<bool> = (0..n).map(|k| ci >> (n - 1 - k) & 1 == 1).collect();
            out.push(Sample { g: FinSeq(g.clone()), c: BitSeq(c) });
        }
    }
    Some(out)
}

fn draw_value(rng: &mut ChaCha8Rng, spec: &BoundSpec, k: usize, cap: u64) -> Nat {
    let bound = match spec.eval(k) {
        ExtNat::Fin(b) => b.to_u64().unwrap_or(u64::MAX).min(cap.max(1)),
        ExtNat::Inf => cap.max(1),
    };
    Nat::from(rng.gen_range(0..bound))
}

/// Extends `c` to length `n` keeping it good: a 1 is only placed where the
/// residue condition for the previous 1 holds.
fn extend_good(rng: &mut ChaCha8Rng, c: &mut Vec<bool>, n: usize) {
    while c.len() < n {
        let p = c.len();
        let allowed = match c.iter().rposition(|&b| b) {
            Some(last) => residue_member(p, &c[..=last]),
            None => true,
        };
        c.push(allowed && rng.gen_bool(0.5));
    }
}

fn draw_sample(rng: &mut ChaCha8Rng, spec: &BoundSpec, n: usize, cap: u64, good: bool) -> Sample {
    let g = (0..n).map(|k| draw_value(rng, spec, k, cap)).collect();
    let mut c = Vec::new();
    if good {
        extend_good(rng, &mut c, n);
    } else {
        c = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    }
    Sample { g, c: BitSeq(c) }
}

/// A second sample sharing a random-length prefix with `base`, then redrawn,
/// and forced to differ at the first redrawn position.
fn diverging_from(rng: &mut ChaCha8Rng, spec: &BoundSpec, base: &Sample, cap: u64, good: bool) -> Sample {
    let n = base.g.len();
    let k = rng.gen_range(0..n);
    let mut g: Vec<Nat> = base.g[..k].to_vec();
    let mut c: Vec<bool> = base.c[..k].to_vec();
    for j in k..n {
        g.push(draw_value(rng, spec, j, cap));
    }
    if good {
        extend_good(rng, &mut c, n);
    } else {
        c.extend((k..n).map(|_| rng.gen_bool(0.5)));
    }
    if g[k] == base.g[k] && c[k] == base.c[k] {
        // Flip whichever coordinate can change.
        let alt = (&g[k] + 1u32) % match spec.eval(k) {
            ExtNat::Fin(b) => b,
            ExtNat::Inf => Nat::from(cap.max(2)),
        };
        if alt != g[k] {
            g[k] = alt;
        } else {
            c[k] = !c[k];
            if good && !crate::construction::is_good(&c) {
                c.truncate(k + 1);
                extend_good(rng, &mut c, n);
            }
        }
    }
    Sample { g: FinSeq(g), c: BitSeq(c) }
}

/// A context whose marked set holds 2 and 4 (from `g↾1 = (0)`, `g↾2 = (0,0)`
/// and `c = 011…`) and which copies `e(b)` there. `b` is made to diverge at 0
/// by setting `b.c(0) = 1`, so `ê` agrees with `e(b)` at 2 and 4 unless `b`
/// marks them too.
fn planted(codec: &PairCodec, rng: &mut ChaCha8Rng, spec: &BoundSpec, b: &mut Sample, cap: u64) -> Result<Sample> {
    let n = b.g.len();
    b.c.0[0] = true;
    let ctx = ConstructionContext::new(codec.clone(), b.g.clone(), b.c.clone())?;
    let e = ctx.e_prefix(n)?;
    let mut a = draw_sample(rng, spec, n, cap, false);
    a.g.0[0] = Nat::from(0u32);
    a.g.0[1] = Nat::from(0u32);
    a.g.0[2] = e[2].clone();
    a.g.0[4] = e[4].clone();
    a.c.0[..3].copy_from_slice(&[false, true, true]);
    Ok(a)
}

fn divergence(a: &Sample, b: &Sample) -> Option<usize> {
    (0..a.g.len()).find(|&k| a.g[k] != b.g[k] || a.c[k] != b.c[k])
}

fn finish(
    suite: Suite,
    spec: &BoundSpec,
    cfg: &VerifyConfig,
    mode: Mode,
    report: Report,
    started: Instant,
) -> VerifyReport {
    let sampled = mode == Mode::Sampled;
    VerifyReport {
        suite,
        spec: spec.clone(),
        horizon: cfg.horizon,
        mode,
        seed: sampled.then_some(cfg.seed),
        samples: sampled.then_some(cfg.samples),
        pass: report.counterexample.is_none(),
        counterexample: report.counterexample,
        counts: report.counts,
        elapsed_ms: started.elapsed().as_millis(),
    }
}

pub fn run_suite(subject: &dyn Subject, suite: Suite, spec: &BoundSpec, cfg: &VerifyConfig) -> Result<VerifyReport> {
    match suite {
        Suite::Ad => verify_ad_suite(subject, spec, cfg),
        Suite::Ed => verify_ed_suite(subject, spec, cfg),
        Suite::Tree => verify_tree_suite(subject, spec, cfg),
        Suite::Lift => verify_lift_suite(subject, spec, cfg),
    }
}

/// Marks `2·#(g↾j)` below `bound` contributed by the 1-positions `j` of `c`.
fn potential_marks(s: &Sample, bound: &Nat) -> Vec<(Nat, usize)> {
    (0..s.g.len())
        .filter(|&j| s.c[j])
        .map(|j| (encode_seq(&s.g[..j]) * 2u32, j))
        .filter(|(m, _)| m < bound)
        .collect()
}

/// The 1-positions of a good `c` that may lie outside `I_{c↾n*}`: those up to
/// and including the first 1 at a position `≥ n* − 1`.
fn exceptional_ones(c: &[bool], n_star: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for j in (0..c.len()).filter(|&j| c[j]) {
        out.insert(j);
        if j + 1 >= n_star {
            break;
        }
    }
    out
}

fn check_marked_set(
    subject: &dyn Subject,
    codec: &PairCodec,
    s: &Sample,
    report: &mut Report,
) -> Result<Option<BTreeSet<usize>>> {
    let ctx = ConstructionContext::new(codec.clone(), s.g.clone(), s.c.clone())?;
    let got = subject.marked_set(&ctx)?.0;
    let want = reference::marked_set(codec, &s.g, &s.c)?;
    report.bump("contexts");
    if got != want {
        report.fail(json!({ "check": "marked_set", "context": s.json(), "got": got, "expected": want }));
        return Ok(None);
    }
    if let Some(odd) = got.iter().find(|&&m| m % 2 == 1) {
        report.fail(json!({ "check": "marked_set_even", "context": s.json(), "odd": odd }));
        return Ok(None);
    }
    Ok(Some(got))
}

/// Marked sets match the reference, and for good `c` the potential marks of
/// two diverging contexts only meet where the divergence bound allows.
pub fn verify_ad_suite(subject: &dyn Subject, spec: &BoundSpec, cfg: &VerifyConfig) -> Result<VerifyReport> {
    const VALUE_BOUND: u64 = 1 << 16;
    let started = Instant::now();
    let codec = PairCodec::new(spec.clone());
    let n = cfg.horizon;
    let bound = Nat::from(VALUE_BOUND);
    let mut report = Report::new();

    let check_pair = |a: &Sample, b: &Sample, m: &Nat, j: usize, report: &mut Report| {
        let Some(div) = divergence(a, b) else { return };
        let n_star = div + 1;
        report.bump("pairs_sharing_a_mark");
        let allowed = j < n_star
            || exceptional_ones(&a.c, n_star).contains(&j)
            || exceptional_ones(&b.c, n_star).contains(&j);
        if !allowed {
            report.fail(json!({
                "check": "almost_disjoint",
                "left": a.json(),
                "right": b.json(),
                "mark": crate::json::nat_value(m),
                "source_index": j,
                "divergence_bound": n_star,
            }));
        }
    };

    let mode = match enumerate_contexts(spec, n, cfg.budget) {
        Some(all) => {
            for s in &all {
                check_marked_set(subject, &codec, s, &mut report)?;
                if report.failed() {
                    break;
                }
            }
            let good: Vec<&Sample> = all.iter().filter(|s| reference::is_good(&s.c)).collect();
            report.add("good_contexts", good.len() as u64);
            // Contexts sharing a mark share g↾j and have c(j) = 1; group by mark.
            let mut by_mark: BTreeMap<Nat, Vec<(usize, usize)>> = BTreeMap::new();
            for (i, s) in good.iter().enumerate() {
                for (m, j) in potential_marks(s, &bound) {
                    by_mark.entry(m).or_default().push((i, j));
                }
            }
            'outer: for (m, members) in &by_mark {
                for (x, &(i, j)) in members.iter().enumerate() {
                    for &(k, _) in &members[x + 1..] {
                        check_pair(good[i], good[k], m, j, &mut report);
                        if report.failed() {
                            break 'outer;
                        }
                    }
                }
            }
            Mode::Exhaustive
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for _ in 0..cfg.samples {
                let a = draw_sample(&mut rng, spec, n, cfg.value_cap, true);
                let b = diverging_from(&mut rng, spec, &a, cfg.value_cap, true);
                report.bump("pairs");
                for s in [&a, &b] {
                    check_marked_set(subject, &codec, s, &mut report)?;
                }
                let mb = potential_marks(&b, &bound);
                for (m, j) in potential_marks(&a, &bound) {
                    if mb.iter().any(|(m2, _)| *m2 == m) {
                        check_pair(&a, &b, &m, j, &mut report);
                    }
                }
                if report.failed() {
                    break;
                }
            }
            Mode::Sampled
        }
    };
    Ok(finish(Suite::Ad, spec, cfg, mode, report, started))
}

struct Evaluated {
    s: Sample,
    e: FinSeq,
    e_hat: FinSeq,
    nu: BTreeSet<usize>,
}

fn evaluate(subject: &dyn Subject, codec: &PairCodec, s: Sample, report: &mut Report) -> Result<Evaluated> {
    let ctx = ConstructionContext::new(codec.clone(), s.g.clone(), s.c.clone())?;
    let n = ctx.len();
    let e = subject.e_prefix(&ctx, n)?;
    let e_hat = subject.e_hat_prefix(&ctx, n)?;
    let nu = subject.marked_set(&ctx)?.0;
    let want = reference::e_hat(codec, &s.g, &s.c)?;
    if e_hat[..] != want[..] {
        report.fail(json!({
            "check": "e_hat",
            "context": s.json(),
            "got": nats_value(&e_hat),
            "expected": nats_value(&want),
        }));
    }
    Ok(Evaluated { s, e, e_hat, nu })
}

/// Eventual-difference structure of one ordered pair `(a, b)` of distinct contexts.
fn check_ed_pair(codec: &PairCodec, a: &Evaluated, b: &Evaluated, report: &mut Report) {
    let Some(div) = divergence(&a.s, &b.s) else { return };
    let n = a.s.g.len();
    for k in div + 1..n {
        if a.e[k] == b.e[k] {
            report.fail(json!({
                "check": "e_injective",
                "left": a.s.json(),
                "right": b.s.json(),
                "position": k,
            }));
            return;
        }
        if a.e_hat[k] == b.e_hat[k] && !a.nu.contains(&k) && !b.nu.contains(&k) {
            report.fail(json!({
                "check": "agreement_outside_marked_sets",
                "left": a.s.json(),
                "right": b.s.json(),
                "position": k,
            }));
            return;
        }
    }
    let x: Vec<usize> = (div + 1..n)
        .filter(|&k| a.nu.contains(&k) && !b.nu.contains(&k) && a.e_hat[k] == b.e[k])
        .collect();
    if x.len() >= 2 {
        report.bump("structural_checks");
        let (n0, n1) = (x[0], x[1]);
        let ordered = reference::order(codec, &a.s.g, n0, n1);
        let reverted = (n1 + 1..n).all(|m| a.e_hat[m] == a.e[m]);
        if !(ordered && reverted) {
            report.fail(json!({
                "check": "agreement_structure",
                "left": a.s.json(),
                "right": b.s.json(),
                "agreements": x,
                "ordered": ordered,
                "reverted": reverted,
            }));
        }
    }
}

/// Distinct contexts: `e`-values differ past the divergence, `ê`-values can
/// only agree inside a marked set, and two agreements of `ê(g₀,c₀)` with
/// `e(g₁,c₁)` inside `ν(g₀,c₀)` are `⊲`-ordered and switch `ê` back to `e`.
pub fn verify_ed_suite(subject: &dyn Subject, spec: &BoundSpec, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let started = Instant::now();
    let codec = PairCodec::new(spec.clone());
    let n = cfg.horizon;
    let mut report = Report::new();
    let mode = match enumerate_contexts(spec, n, cfg.budget) {
        Some(all) => {
            let mut evals = Vec::with_capacity(all.len());
            for s in all {
                evals.push(evaluate(subject, &codec, s, &mut report)?);
                if report.failed() {
                    break;
                }
            }
            report.add("contexts", evals.len() as u64);
            'outer: for i in 0..evals.len() {
                for j in i + 1..evals.len() {
                    report.bump("pairs");
                    check_ed_pair(&codec, &evals[i], &evals[j], &mut report);
                    check_ed_pair(&codec, &evals[j], &evals[i], &mut report);
                    if report.failed() {
                        break 'outer;
                    }
                }
            }
            Mode::Exhaustive
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for i in 0..cfg.samples {
                let mut b = draw_sample(&mut rng, spec, n, cfg.value_cap, false);
                let a = if i % 3 == 0 {
                    diverging_from(&mut rng, spec, &b, cfg.value_cap, false)
                } else if i % 3 == 2 && n >= 5 {
                    planted(&codec, &mut rng, spec, &mut b, cfg.value_cap)?
                } else {
                    // g₀ copies e(g₁,c₁) at random positions to provoke agreements.
                    let ctx = ConstructionContext::new(codec.clone(), b.g.clone(), b.c.clone())?;
                    let e1 = ctx.e_prefix(n)?;
                    let mut a = draw_sample(&mut rng, spec, n, cfg.value_cap, false);
                    for k in 0..n {
                        if rng.gen_bool(0.5) {
                            a.g.0[k] = e1[k].clone();
                        }
                    }
                    a
                };
                if divergence(&a, &b).is_none() {
                    report.bump("identical_pairs_skipped");
                    continue;
                }
                report.bump("pairs");
                let ea = evaluate(subject, &codec, a, &mut report)?;
                let eb = evaluate(subject, &codec, b, &mut report)?;
                check_ed_pair(&codec, &ea, &eb, &mut report);
                check_ed_pair(&codec, &eb, &ea, &mut report);
                if report.failed() {
                    break;
                }
            }
            Mode::Sampled
        }
    };
    Ok(finish(Suite::Ed, spec, cfg, mode, report, started))
}

/// Every `ê`-prefix is a node of `T`. When the level can be enumerated,
/// also reports `|P_N|`, `|T_N|` and how many nodes of `T_N ∖ P_N` extend.
pub fn verify_tree_suite(subject: &dyn Subject, spec: &BoundSpec, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let started = Instant::now();
    let codec = PairCodec::new(spec.clone());
    let tree = Tree::from_codec(codec.clone());
    let n = cfg.horizon;
    let mut report = Report::new();

    let check = |s: &Sample, report: &mut Report| -> Result<FinSeq> {
        let ctx = ConstructionContext::new(codec.clone(), s.g.clone(), s.c.clone())?;
        let f = subject.e_hat_prefix(&ctx, n)?;
        if let Some(l) = (0..=n).find(|&l| !subject.tree_contains(&tree, &f[..l])) {
            report.fail(json!({
                "check": "prefix_in_tree",
                "context": s.json(),
                "e_hat": nats_value(&f),
                "length": l,
            }));
        }
        Ok(f)
    };

    let mode = match enumerate_contexts(spec, n, cfg.budget) {
        Some(all) => {
            let mut prefixes = BTreeSet::new();
            for s in &all {
                report.bump("contexts");
                prefixes.insert(check(s, &mut report)?);
                if report.failed() {
                    break;
                }
            }
            report.add("branch_prefixes", prefixes.len() as u64);
            if !report.failed() && n >= 2 && prefixes.len() < 2 {
                report.fail(json!({ "check": "branch_count", "branch_prefixes": prefixes.len() }));
            }
            let level = tree.level(n, None, cfg.budget)?;
            report.add("tree_nodes", level.len() as u64);
            let missing: Vec<&FinSeq> = prefixes.iter().filter(|f| !level.contains(f)).collect();
            if let Some(f) = missing.first() {
                report.fail(json!({ "check": "level_contains_prefixes", "node": nats_value(f) }));
            }
            let extra: Vec<&FinSeq> = level.iter().filter(|f| !prefixes.contains(*f)).collect();
            report.add("tree_only_nodes", extra.len() as u64);
            // A child value at an odd position must be a level-n code, and
            // every level-n code is some e(g,c)(n) over the enumerated contexts.
            let child_cap = all
                .iter()
                .map(|s| codec.encode(&s.g, &s.c))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .and_then(|m| (m + 1u32).to_u64());
            if let Some(cap) = child_cap.filter(|&c| c.saturating_mul(extra.len() as u64) <= cfg.budget * 64) {
                let mut extendable = 0;
                for f in &extra {
                    if !tree.children(f, Some(cap))?.is_empty() {
                        extendable += 1;
                    }
                }
                report.add("tree_only_extendable", extendable);
            }
            Mode::Exhaustive
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut prefixes = BTreeSet::new();
            for _ in 0..cfg.samples {
                let s = draw_sample(&mut rng, spec, n, cfg.value_cap, false);
                report.bump("contexts");
                prefixes.insert(check(&s, &mut report)?);
                if report.failed() {
                    break;
                }
            }
            report.add("branch_prefixes", prefixes.len() as u64);
            Mode::Sampled
        }
    };
    Ok(finish(Suite::Tree, spec, cfg, mode, report, started))
}

/// Every node of the `E`-tree at depth `|E ∩ horizon|` lifts to a prefix that
/// passes the membership test, restricts back, matches the reference lift
/// off `E`, fails membership when perturbed, and differs from every other
/// lift past their separation index. In compact mode the off-`E` values are
/// also checked to be codes of prefixes of the `E`-values.
pub fn verify_lift_suite(subject: &dyn Subject, spec: &BoundSpec, cfg: &VerifyConfig) -> Result<VerifyReport> {
    const SCAN_BOUND: usize = 1 << 24;
    let started = Instant::now();
    let lift = LiftContext::new(spec, cfg.horizon, cfg.compact, SCAN_BOUND)?;
    let n = cfg.horizon;
    let entries = &lift.reindex().entries;
    let depth = lift.e_count_below(n);
    let members = lift.tree().level(depth, Some(cfg.value_cap), cfg.budget)?;
    let mut report = Report::new();
    report.add("members", members.len() as u64);
    report.add("e_depth", depth as u64);

    let mut lifted: Vec<FinSeq> = Vec::with_capacity(members.len());
    for f in &members {
        let g = subject.lift_member_prefix(&lift, f, n)?;
        let fail = |check: &str, extra: Value| {
            json!({ "check": check, "member_on_e": nats_value(f), "lifted": nats_value(&g), "detail": extra })
        };
        if g.len() != n || !subject.lift_membership(&lift, &g) {
            report.fail(fail("round_trip", Value::Null));
        } else if lift.restrict_to_e(&g) != *f {
            report.fail(fail("restriction", Value::Null));
        }
        for k in (0..n).filter(|k| lift.reindex().index_of(*k).is_none()) {
            let want = reference::lift_value(spec, entries, lift.compact(), &g, k);
            if g[k] != want {
                report.fail(fail("off_e_value", json!({ "position": k })));
                break;
            }
            if lift.compact() {
                let s = crate::coding::decode_seq(&g[k]);
                let below = lift.e_count_below(k);
                let on_e = lift.restrict_to_e(&g);
                let predicted = s.len() <= below && on_e.starts_with(&s[..]) && spec.eval(k).admits(&g[k]);
                let zero_below = k >= entries[0] || g[k] == Nat::from(0u32);
                report.bump("compact_values_checked");
                if !(predicted && zero_below) {
                    report.fail(fail("compact_value_set", json!({ "position": k })));
                    break;
                }
            }
        }
        // A one-coordinate change off E must leave the family.
        let perturb = (0..n).find(|&k| {
            lift.reindex().index_of(k).is_none() && spec.eval(k) > ExtNat::from(1)
        });
        if let Some(k) = perturb {
            let mut bad = g.clone();
            bad.0[k] = if spec.eval(k).admits(&(&g[k] + 1u32)) { &g[k] + 1u32 } else { &g[k] - 1u32 };
            report.bump("perturbations");
            if subject.lift_membership(&lift, &bad) {
                report.fail(fail("perturbation_accepted", json!({ "position": k })));
            }
        }
        lifted.push(g);
        if report.failed() {
            break;
        }
    }

    if !report.failed() {
        'outer: for i in 0..members.len() {
            for j in i + 1..members.len() {
                let Some(start) = lift.separation_index(&members[i], &members[j]) else { continue };
                report.bump("pairs");
                let bad = (start..n).find(|&k| lift.reindex().index_of(k).is_none() && lifted[i][k] == lifted[j][k]);
                if let Some(k) = bad {
                    report.fail(json!({
                        "check": "lifted_eventually_different",
                        "left": nats_value(&members[i]),
                        "right": nats_value(&members[j]),
                        "separation_index": start,
                        "position": k,
                    }));
                    break 'outer;
                }
            }
        }
    }
    Ok(finish(Suite::Lift, spec, cfg, Mode::Exhaustive, report, started))
}

/// Distinct `(g, c)` restrictions get distinct `e`-values at each coordinate:
/// for every `n ≤ len` the map `(g↾n, c↾n) ↦ #_F(g↾n, c↾n)` is injective over
/// all contexts of length `len`. Returns the number of contexts checked.
pub fn e_injectivity(spec: &BoundSpec, len: usize, budget: u64) -> Result<u64> {
    let codec = PairCodec::new(spec.clone());
    let mut total = 0;
    for l in 0..=len {
        let all = enumerate_contexts(spec, l, budget).ok_or(Error::BudgetExceeded { budget })?;
        let mut seen: HashMap<Vec<Nat>, (FinSeq, BitSeq)> = HashMap::new();
        for s in all {
            total += 1;
            let ctx = ConstructionContext::new(codec.clone(), s.g.clone(), s.c.clone())?;
            let e = ctx.e_prefix(l)?;
            // Per coordinate: the value at n must determine (g↾n, c↾n).
            for n in 0..l {
                let key = vec![Nat::from(n), e[n].clone()];
                let restriction = (FinSeq(s.g[..n].to_vec()), BitSeq(s.c[..n].to_vec()));
                match seen.get(&key) {
                    Some(prev) if *prev != restriction => {
                        return Err(Error::Precondition(format!(
                            "e-values collide at coordinate {n}: {} / {} vs {} / {}",
                            prev.0, prev.1, restriction.0, restriction.1
                        )));
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(key, restriction);
                    }
                }
            }
        }
    }
    Ok(total)
}
