//! Lifting the family on `∏_{n∈E} F(n)` to all of `∏ₙ F(n)`.
//!
//! `E = {e₀ < e₁ < …}` is the reindex sequence, so `F∘e` satisfies the growth
//! condition and carries its own tree. A member `f` on `E` is extended by
//! filling each `n ∉ E` with `#((f↾m)∘e)` for the largest `m ≤ n` whose code
//! still fits below `F(n)`. Since `(f↾m)∘e` only grows with `m` and `#`
//! increases along extensions, that is the longest list of `E`-values below
//! `n` whose code fits.

use num_traits::Zero;
use serde::Serialize;

use crate::bounds::{classify_regime, reindex_sequence, BoundSpec, ExtNat, Nat, ReindexSeq};
use crate::coding::{encode_seq, prefix_codes_below, FinSeq};
use crate::error::{Error, Result};
use crate::tree::Tree;

#[derive(Clone, Debug)]
pub struct LiftContext {
    spec: BoundSpec,
    reindex: ReindexSeq,
    horizon: usize,
    tree: Tree,
}

impl LiftContext {
    /// Computes `e` far enough that `E ∩ [0, horizon)` is complete. In
    /// `compact` mode every `e_m` is drawn from `{n : F(n) < ∞}`.
    pub fn new(spec: &BoundSpec, horizon: usize, compact: bool, scan_bound: usize) -> Result<Self> {
        let mut count = 1;
        let reindex = loop {
            let r = reindex_sequence(spec, count, compact, scan_bound)?;
            if r.entries.last().is_some_and(|&e| e >= horizon) {
                break r;
            }
            count += 1;
        };
        let tree = Tree::new(&reindex.composed_spec(spec));
        Ok(LiftContext { spec: spec.clone(), reindex, horizon, tree })
    }

    pub fn spec(&self) -> &BoundSpec {
        &self.spec
    }

    pub fn reindex(&self) -> &ReindexSeq {
        &self.reindex
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn compact(&self) -> bool {
        self.reindex.restrict_to_finite
    }

    /// The tree of the family on `E`, over the bound `F∘e`.
    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    /// `|E ∩ [0, n)|`, i.e. the number of `E`-values a length-`n` prefix sees.
    pub fn e_count_below(&self, n: usize) -> usize {
        self.reindex.count_below(n)
    }

    /// `⟨g(e₀), g(e₁), …⟩` over the `e_k < len(g)`.
    pub fn restrict_to_e(&self, g: &[Nat]) -> FinSeq {
        self.reindex.entries.iter().take_while(|&&e| e < g.len()).map(|&e| g[e].clone()).collect()
    }

    /// The lifted value at `n ∉ E`, given at least `|E ∩ [0,n)|` values on `E`.
    pub fn off_e_value(&self, on_e: &[Nat], n: usize) -> Nat {
        if self.compact() && n < self.reindex.entries[0] {
            return Nat::zero();
        }
        let k = self.e_count_below(n);
        match self.spec.eval(n) {
            ExtNat::Inf => encode_seq(&on_e[..k]),
            ExtNat::Fin(bound) => prefix_codes_below(&on_e[..k], &bound)
                .pop()
                .expect("the empty prefix has code 0 < F(n)"),
        }
    }

    /// `ĝ(f)↾upto` for a member prefix `f` given on `E`.
    pub fn lift_member_prefix(&self, f_on_e: &[Nat], upto: usize) -> Result<FinSeq> {
        self.check_upto(upto)?;
        let needed = self.e_count_below(upto);
        if f_on_e.len() < needed {
            return Err(Error::Precondition(format!(
                "need {needed} values on E for a prefix of length {upto}, got {}",
                f_on_e.len()
            )));
        }
        if !self.tree.contains(&f_on_e[..needed]) {
            return Err(Error::Precondition("values on E are not a node of the E-tree".into()));
        }
        Ok((0..upto)
            .map(|n| match self.reindex.index_of(n) {
                Some(k) => f_on_e[k].clone(),
                None => self.off_e_value(f_on_e, n),
            })
            .collect())
    }

    /// `g` is a prefix of a lifted member: `g↾E` is a tree node and every
    /// off-`E` value is the one the lift prescribes.
    pub fn lift_membership(&self, g: &[Nat]) -> bool {
        if g.len() > self.horizon || self.spec.check_sequence(g).is_err() {
            return false;
        }
        let on_e = self.restrict_to_e(g);
        if !self.tree.contains(&on_e) {
            return false;
        }
        (0..g.len()).all(|n| self.reindex.index_of(n).is_some() || g[n] == self.off_e_value(&on_e, n))
    }

    /// For members diverging on `E`, an index from which their lifts can only
    /// agree on `E`: past the first `E`-divergence `e_k`, and far enough that
    /// both codes of `(f↾e_k+1)∘e` fit below `F`. `None` when the two lists
    /// do not diverge.
    pub fn separation_index(&self, f0: &[Nat], f1: &[Nat]) -> Option<usize> {
        let k = f0.iter().zip(f1).position(|(a, b)| a != b)?;
        let m0 = self.reindex.entries[k];
        let code = encode_seq(&f0[..=k]).max(encode_seq(&f1[..=k]));
        let fits = self.spec.eventually_exceeds(&code)?;
        Some(fits.max(m0 + 1))
    }

    fn check_upto(&self, upto: usize) -> Result<()> {
        if upto > self.horizon {
            return Err(Error::HorizonTooSmall { horizon: self.horizon, needed: upto });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagonal {
    pub g: FinSeq,
    /// From here on `g` differs from every member.
    pub start: usize,
}

/// A `g` that differs from every given member at every `n ≥ start`, where
/// `start` is the least index past which `F(n) > |members|`.
pub fn diagonalize(spec: &BoundSpec, members: &[FinSeq], horizon: usize) -> Result<Diagonal> {
    if !classify_regime(spec).lim_infinite() {
        return Err(Error::RegimeViolation("diagonalization needs lim F = ∞".into()));
    }
    let start = spec
        .eventually_exceeds(&Nat::from(members.len()))
        .ok_or_else(|| Error::RegimeViolation("F never stays above the family size".into()))?;
    if start > horizon {
        return Err(Error::HorizonTooSmall { horizon, needed: start });
    }
    let g = (0..horizon)
        .map(|n| {
            if n < start {
                return Nat::zero();
            }
            let taken: Vec<&Nat> = members.iter().filter_map(|m| m.get(n)).collect();
            let mut v = Nat::zero();
            while taken.contains(&&v) {
                v += 1u32;
            }
            v
        })
        .collect();
    Ok(Diagonal { g, start })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::TailRule;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    fn linear() -> LiftContext {
        LiftContext::new(&BoundSpec::affine(1, 1).unwrap(), 16, false, 1 << 20).unwrap()
    }

    #[test]
    fn context_covers_horizon() {
        let ctx = linear();
        assert_eq!(ctx.reindex().entries, vec![0, 2, 14, 374]);
        assert_eq!(ctx.tree().spec(), &BoundSpec::finite_prefix(&[1, 3, 15, 375]).unwrap());
    }

    #[test]
    fn restrict_examples() {
        let ctx = linear();
        let g: FinSeq = (0..15).map(|v| n(v % 2)).collect();
        assert_eq!(ctx.restrict_to_e(&g[..3]), FinSeq::from([0, 0]));
        assert_eq!(ctx.restrict_to_e(&g), FinSeq::from([0, 0, 0]));
        let compact = LiftContext::new(&compact_spec(), 5, true, 1 << 20).unwrap();
        assert!(compact.restrict_to_e(&[n(0)]).is_empty());
    }

    #[test]
    fn lifted_values() {
        let ctx = linear();
        // Off-E values with f(e₀) = f(e₁) = 0.
        assert_eq!(ctx.off_e_value(&[n(0), n(0)], 1), n(1));
        assert_eq!(ctx.off_e_value(&[n(0), n(0)], 3), n(2));
        // (0, 1, 0) is a node of the tree over F∘e = (1, 3, 15, …); #(0,1) = 5
        // does not fit below F(3) = 4, so ĝ(3) falls back to #(0).
        let g = ctx.lift_member_prefix(&[n(0), n(1), n(0)], 16).unwrap();
        assert_eq!(g[1], n(1));
        assert_eq!(g[3], n(1));
        assert_eq!(g[5], n(5));
        assert!(ctx.lift_membership(&g));
        let mut bad = g.clone();
        bad.0[5] += 1u32;
        assert!(!ctx.lift_membership(&bad));
        assert!(ctx.lift_member_prefix(&[n(0)], 16).is_err());
    }

    fn compact_spec() -> BoundSpec {
        BoundSpec::new(
            vec![ExtNat::Inf, 1.into(), ExtNat::Inf, 2.into()],
            TailRule::Affine { a: 1u32.into(), b: 1u32.into() },
        )
        .unwrap()
    }

    #[test]
    fn compact_lift_starts_with_zero() {
        let ctx = LiftContext::new(&compact_spec(), 24, true, 1 << 20).unwrap();
        assert_eq!(ctx.reindex().entries, vec![1, 4, 22, 942]);
        let g = ctx.lift_member_prefix(&[n(0), n(1), n(0)], 24).unwrap();
        assert_eq!(g[0], n(0));
        assert_eq!(g[2], n(1));
        assert_eq!(g[3], n(1));
        assert!(ctx.lift_membership(&g));
    }

    #[test]
    fn diagonal_examples() {
        let s = BoundSpec::affine(1, 1).unwrap();
        let d = diagonalize(&s, &[], 5).unwrap();
        assert_eq!((d.g, d.start), (FinSeq::from([0, 0, 0, 0, 0]), 0));
        let zero: FinSeq = vec![n(0); 6].into();
        let d = diagonalize(&s, std::slice::from_ref(&zero), 6).unwrap();
        assert_eq!(d.start, 1);
        assert!(d.g[1..].iter().all(|v| *v == n(1)));
        let members = vec![zero, vec![n(1); 6].into(), (0..6).map(|v| n(v % 3)).collect()];
        let d = diagonalize(&s, &members, 6).unwrap();
        assert_eq!(d.start, 3);
        for k in 3..6 {
            assert!(members.iter().all(|m| m[k] != d.g[k]));
        }
        assert!(matches!(diagonalize(&s, &members, 2), Err(Error::HorizonTooSmall { .. })));
        let constant = BoundSpec::new(vec![], TailRule::Constant { value: 3.into() }).unwrap();
        assert!(matches!(diagonalize(&constant, &[], 4), Err(Error::RegimeViolation(_))));
    }
}
