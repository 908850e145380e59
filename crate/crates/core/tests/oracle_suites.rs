use std::collections::BTreeSet;

use medf_core::bounds::TailRule;
use medf_core::oracle::{run_suite, Mode, Standard, Subject, Suite, VerifyConfig};
use medf_core::{BoundSpec, ConstructionContext, ExtNat, FinSeq, LiftContext, MarkedSet, Nat, Result, Tree};

fn small() -> BoundSpec {
    BoundSpec::finite_prefix(&[2, 5, 45]).unwrap()
}

fn pure_inf() -> BoundSpec {
    BoundSpec::new(vec![], TailRule::Infinity).unwrap()
}

fn cfg(horizon: usize) -> VerifyConfig {
    VerifyConfig { horizon, ..VerifyConfig::default() }
}

#[test]
fn suites_pass_exhaustively() {
    for suite in [Suite::Ad, Suite::Ed, Suite::Tree] {
        let r = run_suite(&Standard, suite, &small(), &cfg(3)).unwrap();
        eprintln!("{suite:?} {:?} {}ms", r.counts, r.elapsed_ms);
        assert_eq!(r.mode, Mode::Exhaustive);
        assert!(r.pass, "{suite:?}: {:?}", r.counterexample);
    }
}

#[test]
fn suites_pass_sampled() {
    for suite in [Suite::Ad, Suite::Ed, Suite::Tree] {
        let r = run_suite(&Standard, suite, &pure_inf(), &cfg(12)).unwrap();
        eprintln!("{suite:?} {:?} {}ms", r.counts, r.elapsed_ms);
        assert_eq!(r.mode, Mode::Sampled);
        assert!(r.pass, "{suite:?}: {:?}", r.counterexample);
    }
}

#[test]
fn sampled_reports_are_reproducible() {
    let a = run_suite(&Standard, Suite::Ed, &pure_inf(), &cfg(12)).unwrap();
    let b = run_suite(&Standard, Suite::Ed, &pure_inf(), &cfg(12)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn lift_suite_passes() {
    let r = run_suite(&Standard, Suite::Lift, &BoundSpec::affine(1, 1).unwrap(), &cfg(16)).unwrap();
    eprintln!("{:?}", r.counts);
    assert!(r.pass, "{:?}", r.counterexample);
    assert!(r.counts["members"] > 1);
    let compact = BoundSpec::new(
        vec![ExtNat::Inf, 1.into(), ExtNat::Inf, 2.into()],
        TailRule::Affine { a: 1u32.into(), b: 1u32.into() },
    )
    .unwrap();
    let r = run_suite(&Standard, Suite::Lift, &compact, &VerifyConfig { horizon: 24, compact: true, ..cfg(24) })
        .unwrap();
    eprintln!("{:?}", r.counts);
    assert!(r.pass, "{:?}", r.counterexample);
    assert!(r.counts["compact_values_checked"] > 0);
}

/// Adds an odd element to every non-empty marked set.
struct OddMark;

impl Subject for OddMark {
    fn marked_set(&self, ctx: &ConstructionContext) -> Result<MarkedSet> {
        let mut s = ctx.marked_set()?;
        if ctx.len() > 1 {
            s.0.insert(1);
        }
        Ok(s)
    }
}

/// Ignores the comparable-pair clause: copies g on the whole marked set.
struct NoSwitchBack;

impl Subject for NoSwitchBack {
    fn e_hat_prefix(&self, ctx: &ConstructionContext, upto: usize) -> Result<FinSeq> {
        let nu = ctx.marked_set()?;
        (0..upto)
            .map(|n| if nu.contains(n) { Ok(ctx.g()[n].clone()) } else { ctx.e_value(n) })
            .collect::<Result<Vec<_>>>()
            .map(FinSeq)
    }
}

/// Forgets c when computing e.
struct BlindE;

impl Subject for BlindE {
    fn e_prefix(&self, ctx: &ConstructionContext, upto: usize) -> Result<FinSeq> {
        let zeros = vec![false; upto];
        (0..upto)
            .map(|n| ctx.codec().encode(&ctx.g()[..n], &zeros[..n]))
            .collect::<Result<Vec<_>>>()
            .map(FinSeq)
    }
}

/// Rejects every node that starts with 1.
struct PickyTree;

impl Subject for PickyTree {
    fn tree_contains(&self, tree: &Tree, f: &[Nat]) -> bool {
        tree.contains(f) && f.first().is_none_or(|v| *v != Nat::from(1u32))
    }
}

/// Shifts the last off-E value of the lift.
struct ShiftedLift;

impl Subject for ShiftedLift {
    fn lift_member_prefix(&self, lift: &LiftContext, f: &[Nat], upto: usize) -> Result<FinSeq> {
        let mut g = lift.lift_member_prefix(f, upto)?;
        let k = (0..upto).rev().find(|&k| lift.reindex().index_of(k).is_none()).unwrap();
        g.0[k] += 1u32;
        Ok(g)
    }
}

fn check_name(r: &medf_core::VerifyReport) -> String {
    r.counterexample.as_ref().expect("counterexample")["check"].as_str().unwrap().to_string()
}

#[test]
fn mutants_are_caught() {
    let r = run_suite(&OddMark, Suite::Ad, &small(), &cfg(3)).unwrap();
    assert!(!r.pass);
    assert_eq!(check_name(&r), "marked_set");

    let r = run_suite(&BlindE, Suite::Ed, &small(), &cfg(3)).unwrap();
    assert!(!r.pass);
    assert_eq!(check_name(&r), "e_injective");

    let r = run_suite(&NoSwitchBack, Suite::Ed, &pure_inf(), &cfg(12)).unwrap();
    assert!(!r.pass);
    assert_eq!(check_name(&r), "e_hat");

    let r = run_suite(&PickyTree, Suite::Tree, &small(), &cfg(3)).unwrap();
    assert!(!r.pass);
    assert_eq!(check_name(&r), "prefix_in_tree");

    let r = run_suite(&ShiftedLift, Suite::Lift, &BoundSpec::affine(1, 1).unwrap(), &cfg(16)).unwrap();
    assert!(!r.pass);
}

#[test]
fn counterexample_is_first_in_order() {
    let r = run_suite(&OddMark, Suite::Ad, &small(), &cfg(3)).unwrap();
    let cx = r.counterexample.unwrap();
    // g = (0,0,0) is the first context of length 3; c = 000 the first bit string.
    assert_eq!(cx["context"]["g"], serde_json::json!([0, 0, 0]));
    assert_eq!(cx["context"]["c"], "000");
    let _: BTreeSet<usize> = serde_json::from_value(cx["got"].clone()).unwrap();
}
