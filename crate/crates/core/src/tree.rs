//! The decidable tree `T` whose infinite branches are the family.
//!
//! A node `f̄` is checked at every odd position `m`: `f̄(m)` must decode to a
//! pair `(ḡ, c̄)` of length `m`, and `f̄↾m` must be the `ê`-image of that pair.
//! Each check only reads `f̄↾m+1`, so a node is valid exactly when all of its
//! odd positions pass, and validity is inherited by initial segments.
//!
//! The goodness clause is evaluated on `c̄↾n` for each `n < m`, matching the
//! latched goodness clause of `ê`. Requiring all of `c̄` to be good would
//! reject `ê`-prefixes whose `c` turns bad only after position `n`.

use num_traits::Zero;

use crate::bounds::{BoundSpec, ExtNat, Nat};
use crate::coding::{pair, BitSeq, FinSeq, PairCodec};
use crate::construction::{first_bad_prefix, order_rel, ConstructionContext};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Tree {
    codec: PairCodec,
}

impl Tree {
    pub fn new(spec: &BoundSpec) -> Self {
        Tree { codec: PairCodec::new(spec.clone()) }
    }

    pub fn from_codec(codec: PairCodec) -> Self {
        Tree { codec }
    }

    pub fn codec(&self) -> &PairCodec {
        &self.codec
    }

    pub fn spec(&self) -> &BoundSpec {
        self.codec.spec()
    }

    /// The clause check at odd position `m`, reading `f↾m+1`.
    pub fn position_ok(&self, f: &[Nat], m: usize) -> bool {
        debug_assert!(m % 2 == 1 && m < f.len());
        let p = self.codec.decode(&f[m]);
        if p.level() != m {
            return false;
        }
        let (g, c) = (&p.h[..], &p.d[..]);

        // e-values #_F(ḡ↾n, c̄↾n) for n < m.
        let mut codes = Vec::with_capacity(m);
        for n in 0..m {
            match self.codec.encode(&g[..n], &c[..n]) {
                Ok(v) => codes.push(v),
                Err(_) => return false,
            }
        }

        // ν(ḡ, c̄) ∩ m
        let mut in_nu = vec![false; m];
        let mut code = Nat::zero();
        for j in 0..m {
            let mark = &code << 1u32;
            if mark >= Nat::from(m) {
                break;
            }
            if c[j] {
                let mark: usize = mark.try_into().expect("below m");
                if g[mark] != codes[mark] {
                    in_nu[mark] = true;
                }
            }
            code = pair(&code, &g[j]) + 1u32;
        }

        let good_below = first_bad_prefix(c).unwrap_or(usize::MAX);
        let mut earlier: Vec<usize> = Vec::new();
        let mut comparable = false;
        for n in 0..m {
            let copy = n < good_below && !comparable && in_nu[n];
            let expected = if copy { &g[n] } else { &codes[n] };
            if f[n] != *expected {
                return false;
            }
            if in_nu[n] {
                comparable = comparable || earlier.iter().any(|&n0| order_rel(&self.codec, g, n0, n));
                earlier.push(n);
            }
        }
        true
    }

    /// Length of the longest valid initial segment of `f`.
    pub fn valid_prefix_len(&self, f: &[Nat]) -> usize {
        for (n, v) in f.iter().enumerate() {
            if !self.spec().admits(n, v) || (n % 2 == 1 && !self.position_ok(f, n)) {
                return n;
            }
        }
        f.len()
    }

    pub fn contains(&self, f: &[Nat]) -> bool {
        self.valid_prefix_len(f) == f.len()
    }

    /// Valid one-step extensions `f⌢v` with `v < min(F(len), value_budget)`.
    /// An invalid `f` has no children.
    pub fn children(&self, f: &[Nat], value_budget: Option<u64>) -> Result<Vec<FinSeq>> {
        if !self.contains(f) {
            return Ok(vec![]);
        }
        let l = f.len();
        let cap = match (self.spec().eval(l), value_budget) {
            (ExtNat::Fin(b), Some(k)) => b.min(Nat::from(k)),
            (ExtNat::Fin(b), None) => b,
            (ExtNat::Inf, Some(k)) => Nat::from(k),
            (ExtNat::Inf, None) => {
                return Err(Error::Precondition(format!(
                    "F({l}) = ∞ needs a value budget to enumerate children"
                )))
            }
        };
        let cap: u64 = cap
            .try_into()
            .map_err(|_| Error::Precondition(format!("F({l}) too large to enumerate")))?;
        let mut out = Vec::new();
        let mut child = f.to_vec();
        child.push(Nat::zero());
        for v in 0..cap {
            child[l] = Nat::from(v);
            if l.is_multiple_of(2) || self.position_ok(&child, l) {
                out.push(FinSeq(child.clone()));
            }
        }
        Ok(out)
    }

    /// All nodes of length `level`, breadth first, in lexicographic order.
    pub fn level(&self, level: usize, value_budget: Option<u64>, max_nodes: u64) -> Result<Vec<FinSeq>> {
        let mut frontier = vec![FinSeq::new()];
        for _ in 0..level {
            let mut next = Vec::new();
            for node in &frontier {
                next.extend(self.children(node, value_budget)?);
                if next.len() as u64 > max_nodes {
                    return Err(Error::BudgetExceeded { budget: max_nodes });
                }
            }
            frontier = next;
        }
        Ok(frontier)
    }
}

/// Checks that every initial segment of `ê(g,c)↾N` is a node of `T`.
pub fn branch_prefix_check(spec: &BoundSpec, g: &FinSeq, c: &BitSeq) -> Result<bool> {
    let ctx = ConstructionContext::from_spec(spec, g.clone(), c.clone())?;
    let f = ctx.e_hat_prefix(ctx.len())?;
    let tree = Tree::from_codec(ctx.codec().clone());
    Ok(tree.contains(&f))
}
