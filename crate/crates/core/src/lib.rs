//! Decision-tree induction with penalized and one-sided split criteria.
//!
//! This crate grows binary classification and regression trees by exhaustive
//! candidate-split search, scoring splits with either the classical
//! child-size-weighted impurity reduction or a one-sided criterion that looks
//! only at the better child. Split gains are normalized to `[0, 1]` by a
//! parent-node scaling so that an interpretability penalty with a constant
//! `k` in `[0, 1]` can be subtracted from them. Two penalties are provided:
//! a flat charge on splits that introduce a variable not yet used in the
//! branch, and an exponential-moving-average charge that also prefers
//! recently used variables. The crate additionally implements the
//! loss-constrained rule for picking the penalty constant and bootstrap
//! out-of-bag risk estimation for comparing fitting procedures.
//!
//! The crate is `no_std` (it requires `alloc`); CSV ingestion, model files,
//! rendering and the command line live in the companion `treepen` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod evaluation;
pub mod gain;
pub mod grower;
pub mod impurity;
pub mod penalty;
pub mod rng;
pub mod tuning;

pub use dataset::{bootstrap_sample, Dataset, DatasetError, RowSet, TaskKind};
pub use evaluation::{
    compare_penalties, interpretability_metrics, oob_estimate, CompareRow, FitProcedure,
    InterpretabilityMetrics, OobConfig, OobError, OobReport, ReplicateOutcome,
};
pub use gain::{raw_gain, scale_gain, ClassImpurity, GainError, GainKind, SplitEvaluation};
pub use grower::{
    best_split, candidate_splits, grow, min_child_size, modal_class, partition, predict,
    DimensionMismatch, FittedValue, GrowConfig, GrowError, NodeKind, SplitRule, Tree, TreeNode,
};
pub use impurity::{
    impurity, misclassification_rate, node_stats, ImpurityError, ImpurityKind, NodeStats,
};
pub use penalty::{penalized_objective, penalty, BranchPath, PenaltyConstant, PenaltyKind};
pub use tuning::{in_sample_loss, r_squared, tune, EvalError, TuneConfig, TuneResult};
