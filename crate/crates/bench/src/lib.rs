//! Shared fixtures for the construction benchmarks.

use medf_core::{BoundSpec, FinSeq};

/// `F = (2, 5, 45, ∞, ∞, …)`, the smallest interesting growth-satisfying bound.
pub fn small_spec() -> BoundSpec {
    BoundSpec::finite_prefix(&[2, 5, 45]).expect("valid spec")
}

/// `F(n) = n + 1`, which needs reindexing before the construction applies.
pub fn linear_spec() -> BoundSpec {
    BoundSpec::affine(1, 1).expect("valid spec")
}

/// A deterministic sequence inside `small_spec()`.
pub fn sample_g(len: usize) -> FinSeq {
    let bounds = [2u64, 5, 45];
    (0..len)
        .map(|n| {
            let v = (n as u64 * 7 + 3) % 97;
            bounds.get(n).map_or(v, |&b| v % b).into()
        })
        .collect()
}
