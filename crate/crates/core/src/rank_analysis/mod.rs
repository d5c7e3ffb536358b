//! Rank statistics and the brute-force rank-preservation verifier.

mod preservation;
mod spearman;
mod verifier;

pub use preservation::{instance_rank_inputs, pairwise_rank_preservation, PairThreshold, PreservationStats};
pub use spearman::{fractional_ranks, spearman, RankReport};
pub use verifier::{
    check_pair, falsify_converse, verify_batch, Counterexample, FalsifyReport, FlipWitness, TheoremVerdict,
    VerificationReport, VerifyOptions, COUNTEREXAMPLE_CAP, DEFAULT_TRIGGER_FLOOR, INEQUALITY_TOLERANCE,
};
