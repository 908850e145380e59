//! Effective construction of closed maximal eventually different families
//! in product spaces `∏ₙ F(n)`, evaluated on finite prefixes.

pub mod bounds;
pub mod coding;
pub mod construction;
pub mod error;
pub mod json;
pub mod lift;
pub mod oracle;
pub mod probe;
pub mod tree;

pub use bounds::{BoundSpec, ExtNat, Nat, ReindexSeq, TailRule};
pub use coding::{BitSeq, FinSeq, PairCode, PairCodec};
pub use construction::{ConstructionContext, MarkedSet};
pub use error::{Error, Result};
pub use tree::Tree;
pub use lift::LiftContext;
pub use probe::{ProbeConfig, ProbeOutcome, Strategy};
pub use oracle::{run_suite, Standard, Subject, Suite, VerifyConfig, VerifyReport};
