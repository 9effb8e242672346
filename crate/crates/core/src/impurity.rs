//! Node impurity functions.
//!
//! Impurity is computed from summary statistics rather than raw rows so the
//! split search can maintain them incrementally during a sorted scan. Lower
//! impurity always means a more desirable node; for the one-sided extremes
//! criteria this forces a sign flip relative to the raw node mean (a child
//! with a *high* mean must have *low* impurity for the minimization in the
//! one-sided gain to isolate it).

use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{Dataset, RowSet, TaskKind};

/// Sufficient statistics of one node.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeStats {
    Regression { n: usize, sum: f64, sum_sq: f64, min: f64, max: f64 },
    Classification { n: usize, counts: Vec<usize> },
}

// Primitive-statistic forms shared by `impurity()` and the grower's sorted
// scan so both paths compute bit-identical values.

pub(crate) fn variance_from(n: usize, sum: f64, sum_sq: f64) -> f64 {
    let nf = n as f64;
    let mean = sum / nf;
    (sum_sq / nf - mean * mean).max(0.0)
}

pub(crate) fn mean_from(n: usize, sum: f64, min: f64, max: f64) -> f64 {
    (sum / n as f64).clamp(min, max)
}

pub(crate) fn gini_from(counts: &[usize], n: usize) -> f64 {
    let nf = n as f64;
    let mut acc = 0.0;
    for &c in counts {
        let p = c as f64 / nf;
        acc += p * (1.0 - p);
    }
    acc
}

pub(crate) fn entropy_from(counts: &[usize], n: usize) -> f64 {
    let nf = n as f64;
    let mut acc = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / nf;
            acc -= p * libm::log(p);
        }
    }
    acc.max(0.0)
}

impl NodeStats {
    pub fn n(&self) -> usize {
        match self {
            NodeStats::Regression { n, .. } | NodeStats::Classification { n, .. } => *n,
        }
    }

    pub fn task(&self) -> TaskKind {
        match self {
            NodeStats::Regression { .. } => TaskKind::Regression,
            NodeStats::Classification { .. } => TaskKind::Classification,
        }
    }

    /// In-node mean, clamped to the observed `[min, max]` so accumulated
    /// rounding can never push it past an actual data value.
    pub fn mean(&self) -> f64 {
        match self {
            NodeStats::Regression { n, sum, min, max, .. } => mean_from(*n, *sum, *min, *max),
            NodeStats::Classification { .. } => panic!("mean() on classification stats"),
        }
    }

    /// Biased (divide-by-n) in-node variance, clamped at zero.
    pub fn variance(&self) -> f64 {
        match self {
            NodeStats::Regression { n, sum, sum_sq, .. } => variance_from(*n, *sum, *sum_sq),
            NodeStats::Classification { .. } => panic!("variance() on classification stats"),
        }
    }

    /// Class proportion `count[k] / n`.
    pub fn proportion(&self, class: usize) -> f64 {
        match self {
            NodeStats::Classification { n, counts } => counts[class] as f64 / *n as f64,
            NodeStats::Regression { .. } => panic!("proportion() on regression stats"),
        }
    }
}

/// Impurity family selector. `ClassExtreme` carries the class of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImpurityKind {
    Variance,
    Gini,
    CrossEntropy,
    HighMeans,
    LowMeans,
    ClassExtreme(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImpurityError {
    /// Stats task does not fit the requested impurity (or class index
    /// exceeds the stats' class count).
    KindMismatch,
    /// A node must contain at least one row.
    EmptyNode,
}

impl fmt::Display for ImpurityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImpurityError::KindMismatch => write!(f, "impurity kind does not match node stats"),
            ImpurityError::EmptyNode => write!(f, "node has no rows"),
        }
    }
}

impl core::error::Error for ImpurityError {}

/// Exact sums and counts over the listed rows, duplicates counted with
/// multiplicity.
pub fn node_stats(dataset: &Dataset, rows: &RowSet) -> Result<NodeStats, ImpurityError> {
    if rows.is_empty() {
        return Err(ImpurityError::EmptyNode);
    }
    match dataset.task() {
        TaskKind::Regression => {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for i in rows.iter() {
                let y = dataset.y(i);
                sum += y;
                sum_sq += y * y;
                min = min.min(y);
                max = max.max(y);
            }
            Ok(NodeStats::Regression { n: rows.len(), sum, sum_sq, min, max })
        }
        TaskKind::Classification => {
            let mut counts = alloc::vec![0usize; dataset.n_classes()];
            for i in rows.iter() {
                counts[dataset.class(i)] += 1;
            }
            Ok(NodeStats::Classification { n: rows.len(), counts })
        }
    }
}

/// Node impurity `phi(t)` under the chosen family.
///
/// Conventions: variance is the biased estimator; cross-entropy uses the
/// natural logarithm with `0 ln 0 := 0`; the extremes impurities are the
/// negated mean / proportion forms discussed in the module docs (HighMeans
/// returns `-mean`, LowMeans `+mean`, `ClassExtreme(k)` `-p_k`).
pub fn impurity(stats: &NodeStats, kind: ImpurityKind) -> Result<f64, ImpurityError> {
    match (kind, stats) {
        (ImpurityKind::Variance, NodeStats::Regression { .. }) => Ok(stats.variance()),
        (ImpurityKind::HighMeans, NodeStats::Regression { .. }) => Ok(-stats.mean()),
        (ImpurityKind::LowMeans, NodeStats::Regression { .. }) => Ok(stats.mean()),
        (ImpurityKind::Gini, NodeStats::Classification { n, counts }) => {
            Ok(gini_from(counts, *n))
        }
        (ImpurityKind::CrossEntropy, NodeStats::Classification { n, counts }) => {
            Ok(entropy_from(counts, *n))
        }
        (ImpurityKind::ClassExtreme(k), NodeStats::Classification { counts, .. }) => {
            if k >= counts.len() {
                return Err(ImpurityError::KindMismatch);
            }
            Ok(-stats.proportion(k))
        }
        _ => Err(ImpurityError::KindMismatch),
    }
}

/// `1 - max_k p_k`: the in-node misclassification rate of the modal class.
///
/// Used for loss reporting, not as a splitting impurity.
pub fn misclassification_rate(stats: &NodeStats) -> Result<f64, ImpurityError> {
    match stats {
        NodeStats::Classification { n, counts } => {
            let best = counts.iter().copied().max().unwrap_or(0);
            Ok(1.0 - best as f64 / *n as f64)
        }
        NodeStats::Regression { .. } => Err(ImpurityError::KindMismatch),
    }
}
