//! Residue classes, good bit sequences, marked sets, the order `⊲_g` and the
//! maps `e`, `ê` evaluated on finite prefixes.
//!
//! Every quantity here is computed from finite data only. The marked set of a
//! length-`N` context is reported as `ν ∩ N`: a mark `2·#(g↾j)` below `N`
//! needs `#(g↾j) < N/2`, and since `#s ≥ len(s)` that only involves `j < N/2`.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bounds::{BoundSpec, Nat};
use crate::coding::{decode_seq, prefix_codes_below, BitSeq, FinSeq, PairCode, PairCodec};
use crate::error::{Error, Result};

/// `n ∈ I_c̄`: the low `len(c̄)` bits of `n` spell `c̄`, least significant first.
pub fn residue_member(n: usize, c: &[bool]) -> bool {
    c.iter().enumerate().all(|(i, &b)| {
        let bit = i < usize::BITS as usize && (n >> i) & 1 == 1;
        bit == b
    })
}

/// Least `b` such that `c↾b` is not good; `c↾n` is good exactly when
/// `n < b`. `None` when `c` itself is good.
pub fn first_bad_prefix(c: &[bool]) -> Option<usize> {
    let mut prev: Option<usize> = None;
    for (n, _) in c.iter().enumerate().filter(|(_, &b)| b) {
        if let Some(n0) = prev {
            if !residue_member(n, &c[..=n0]) {
                return Some(n + 1);
            }
        }
        prev = Some(n);
    }
    None
}

/// Consecutive 1-positions `n₀ < n₁` of `c` always satisfy `n₁ ∈ I_{c↾n₀+1}`.
pub fn is_good(c: &[bool]) -> bool {
    first_bad_prefix(c).is_none()
}

/// `ν(g,c) ∩ N` for a context of length `N`. Elements are even.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MarkedSet(pub BTreeSet<usize>);

impl MarkedSet {
    pub fn contains(&self, n: usize) -> bool {
        self.0.contains(&n)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Marks `2·#(g↾j)` below `bound` for the indices `j` selected by `select`,
/// in increasing order (codes increase along prefixes).
fn marks_below(g: &[Nat], bound: usize, mut select: impl FnMut(usize) -> bool) -> Vec<usize> {
    let half = Nat::from(bound.div_ceil(2));
    prefix_codes_below(&g[..g.len().min(bound)], &half)
        .into_iter()
        .enumerate()
        .filter(|&(j, _)| j < g.len() && select(j))
        .map(|(_, code)| 2 * code.to_usize().expect("below bound"))
        .collect()
}

/// `I_g[c̄] ∩ [0, value_bound)`: marks `2·#(g↾n)` over `n < len(g)` with `n ∈ I_c̄`.
pub fn marked_class(g: &[Nat], c: &[bool], value_bound: usize) -> Vec<usize> {
    marks_below(g, value_bound, |n| residue_member(n, c))
}

/// `n₀ ⊲_g n₁`: `n₀ < n₁ < len(g)`, both values decode to pairs of the
/// matching level, and the decoded pairs are nested.
pub fn order_rel(codec: &PairCodec, g: &[Nat], n0: usize, n1: usize) -> bool {
    if n0 >= n1 || n1 >= g.len() {
        return false;
    }
    let p0 = codec.decode(&g[n0]);
    if p0.level() != n0 {
        return false;
    }
    let p1 = codec.decode(&g[n1]);
    p1.level() == n1 && nested(&p0, &p1)
}

pub(crate) fn nested(p0: &PairCode, p1: &PairCode) -> bool {
    p1.h.starts_with(&p0.h) && p1.d.starts_with(&p0.d)
}

/// A pair `(g, c)` of equal-length prefixes with `g ∈ ∏_{k<N} F(k)`.
#[derive(Clone, Debug)]
pub struct ConstructionContext {
    codec: PairCodec,
    g: FinSeq,
    c: BitSeq,
}

impl ConstructionContext {
    pub fn new(codec: PairCodec, g: FinSeq, c: BitSeq) -> Result<Self> {
        if g.len() != c.len() {
            return Err(Error::LengthMismatch { g: g.len(), c: c.len() });
        }
        codec.spec().check_sequence(&g)?;
        Ok(ConstructionContext { codec, g, c })
    }

    pub fn from_spec(spec: &BoundSpec, g: FinSeq, c: BitSeq) -> Result<Self> {
        Self::new(PairCodec::new(spec.clone()), g, c)
    }

    pub fn codec(&self) -> &PairCodec {
        &self.codec
    }

    pub fn g(&self) -> &FinSeq {
        &self.g
    }

    pub fn c(&self) -> &BitSeq {
        &self.c
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// `e(g,c)(n) = #_F(g↾n, c↾n)`.
    pub fn e_value(&self, n: usize) -> Result<Nat> {
        self.codec.encode(&self.g[..n], &self.c[..n])
    }

    pub fn e_prefix(&self, upto: usize) -> Result<FinSeq> {
        self.check_upto(upto)?;
        (0..upto).map(|n| self.e_value(n)).collect::<Result<Vec<_>>>().map(FinSeq)
    }

    /// Marks `2·#(g↾n)` with `c(n) = 1`, restricted to values below `N`.
    pub fn raw_marks(&self) -> Vec<usize> {
        marks_below(&self.g, self.len(), |n| self.c[n])
    }

    /// `ν(g,c) ∩ N`: marks `m` below `N` with `g(m) ≠ e(g,c)(m)`.
    pub fn marked_set(&self) -> Result<MarkedSet> {
        let mut out = BTreeSet::new();
        for m in self.raw_marks() {
            if self.g[m] != self.e_value(m)? {
                out.insert(m);
            }
        }
        Ok(MarkedSet(out))
    }

    pub fn order_rel(&self, n0: usize, n1: usize) -> bool {
        order_rel(&self.codec, &self.g, n0, n1)
    }

    /// `ê(g,c)↾upto`. The comparable-pair and bad-prefix clauses only ever
    /// switch on as `n` grows, so both are latched.
    pub fn e_hat_prefix(&self, upto: usize) -> Result<FinSeq> {
        self.check_upto(upto)?;
        let nu = self.marked_set()?;
        let bad_from = first_bad_prefix(&self.c).unwrap_or(usize::MAX);
        let mut seen: Vec<usize> = Vec::new();
        let mut comparable = false;
        let mut out = Vec::with_capacity(upto);
        for n in 0..upto {
            let in_nu = nu.contains(n);
            let copy = in_nu && !comparable && n < bad_from;
            out.push(if copy { self.g[n].clone() } else { self.e_value(n)? });
            if in_nu {
                comparable = comparable || seen.iter().any(|&p| self.order_rel(p, n));
                seen.push(n);
            }
        }
        Ok(FinSeq(out))
    }

    /// `I_g[c̄] ∩ [0, value_bound)` for this context's `g`.
    pub fn marked_class(&self, c: &[bool], value_bound: usize) -> Vec<usize> {
        marked_class(&self.g, c, value_bound)
    }

    fn check_upto(&self, upto: usize) -> Result<()> {
        if upto > self.len() {
            return Err(Error::Precondition(format!(
                "prefix length {upto} exceeds context length {}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Recovers `g↾j` from a mark `2·#(g↾j)`; `None` for odd values.
pub fn mark_source(mark: usize) -> Option<FinSeq> {
    mark.is_multiple_of(2).then(|| decode_seq(&Nat::from(mark / 2)))
}
