//! Goodness-of-split evaluation.
//!
//! Two gain shapes are supported. The CART shape scores a split by the
//! child-size-weighted drop in impurity; the one-sided shape scores it by
//! the drop to the *better* child alone, which deliberately ignores how the
//! other child fares and is what lets the extremes criteria chase a single
//! high-mean (or high-proportion) bucket.
//!
//! Raw gains are scale-dependent (regression gains carry the units of `y`
//! squared), so penalties operate on the scaled gain: raw gain divided by a
//! per-criterion parent normalizer chosen so that every feasible split lands
//! in `[0, 1]`. The normalizer is constant across a node's candidates, so
//! scaling never changes which split wins.

use core::fmt;

use crate::impurity::{impurity, ImpurityKind, NodeStats};

/// CART classification impurity choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassImpurity {
    Gini,
    CrossEntropy,
}

/// Split criterion family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainKind {
    CartRegression,
    CartClassification(ClassImpurity),
    OneSidedPurityRegression,
    OneSidedPurityClassification,
    HighMeans,
    LowMeans,
    /// One-sided extremes for classification; carries the class of interest.
    OneSidedExtremeClassification(usize),
}

impl GainKind {
    /// The impurity family this criterion evaluates nodes with.
    pub fn impurity_kind(&self) -> ImpurityKind {
        match self {
            GainKind::CartRegression | GainKind::OneSidedPurityRegression => {
                ImpurityKind::Variance
            }
            GainKind::CartClassification(ClassImpurity::Gini)
            | GainKind::OneSidedPurityClassification => ImpurityKind::Gini,
            GainKind::CartClassification(ClassImpurity::CrossEntropy) => {
                ImpurityKind::CrossEntropy
            }
            GainKind::HighMeans => ImpurityKind::HighMeans,
            GainKind::LowMeans => ImpurityKind::LowMeans,
            GainKind::OneSidedExtremeClassification(k) => ImpurityKind::ClassExtreme(*k),
        }
    }

    /// Whether the gain uses the one-sided (best-child) shape.
    pub fn is_one_sided(&self) -> bool {
        matches!(
            self,
            GainKind::OneSidedPurityRegression
                | GainKind::OneSidedPurityClassification
                | GainKind::HighMeans
                | GainKind::LowMeans
                | GainKind::OneSidedExtremeClassification(_)
        )
    }

    pub fn task(&self) -> crate::dataset::TaskKind {
        match self {
            GainKind::CartRegression
            | GainKind::OneSidedPurityRegression
            | GainKind::HighMeans
            | GainKind::LowMeans => crate::dataset::TaskKind::Regression,
            _ => crate::dataset::TaskKind::Classification,
        }
    }
}

/// The scored outcome of one candidate split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitEvaluation {
    pub raw_gain: f64,
    /// Raw gain over the parent normalizer, in `[0, 1]` for feasible splits.
    pub scaled_gain: f64,
    pub left_stats: NodeStats,
    pub right_stats: NodeStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GainError {
    /// Stats do not match the criterion's task, or children do not add up
    /// to the parent.
    KindMismatch,
    /// A child with zero rows.
    DegenerateChild,
    /// The parent is already pure (or constant) for this criterion; the
    /// caller must treat the node as terminal rather than score splits.
    ZeroDenominator,
}

impl fmt::Display for GainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GainError::KindMismatch => write!(f, "gain kind does not match node stats"),
            GainError::DegenerateChild => write!(f, "split produces an empty child"),
            GainError::ZeroDenominator => {
                write!(f, "parent node is pure for this criterion")
            }
        }
    }
}

impl core::error::Error for GainError {}

/// Unscaled gain of splitting `parent` into `left` and `right`.
pub fn raw_gain(
    parent: &NodeStats,
    left: &NodeStats,
    right: &NodeStats,
    kind: GainKind,
) -> Result<f64, GainError> {
    if left.n() == 0 || right.n() == 0 {
        return Err(GainError::DegenerateChild);
    }
    if left.n() + right.n() != parent.n() {
        return Err(GainError::KindMismatch);
    }
    let ik = kind.impurity_kind();
    let phi_parent = impurity(parent, ik).map_err(|_| GainError::KindMismatch)?;
    let phi_left = impurity(left, ik).map_err(|_| GainError::KindMismatch)?;
    let phi_right = impurity(right, ik).map_err(|_| GainError::KindMismatch)?;
    if kind.is_one_sided() {
        Ok(phi_parent - phi_left.min(phi_right))
    } else {
        let n = parent.n() as f64;
        let weighted =
            (left.n() as f64 / n) * phi_left + (right.n() as f64 / n) * phi_right;
        Ok(phi_parent - weighted)
    }
}

/// The parent normalizer for a criterion: parent impurity for the purity
/// criteria, the headroom to the extreme value for the extremes criteria.
pub fn scaling_denominator(parent: &NodeStats, kind: GainKind) -> Result<f64, GainError> {
    let d = match (kind, parent) {
        (GainKind::CartRegression, _) | (GainKind::OneSidedPurityRegression, _) => {
            impurity(parent, ImpurityKind::Variance).map_err(|_| GainError::KindMismatch)?
        }
        (GainKind::CartClassification(ClassImpurity::Gini), _)
        | (GainKind::OneSidedPurityClassification, _) => {
            impurity(parent, ImpurityKind::Gini).map_err(|_| GainError::KindMismatch)?
        }
        (GainKind::CartClassification(ClassImpurity::CrossEntropy), _) => {
            impurity(parent, ImpurityKind::CrossEntropy).map_err(|_| GainError::KindMismatch)?
        }
        (GainKind::HighMeans, NodeStats::Regression { max, .. }) => *max - parent.mean(),
        (GainKind::LowMeans, NodeStats::Regression { min, .. }) => parent.mean() - *min,
        (GainKind::OneSidedExtremeClassification(k), NodeStats::Classification { counts, .. }) => {
            if k >= counts.len() {
                return Err(GainError::KindMismatch);
            }
            1.0 - parent.proportion(k)
        }
        _ => return Err(GainError::KindMismatch),
    };
    if d > 0.0 {
        Ok(d)
    } else {
        Err(GainError::ZeroDenominator)
    }
}

/// Scales a raw gain into `[0, 1]` by the parent normalizer.
///
/// Negative raw gains clamp to zero (they mean "do not split"); values
/// above zero stay as the exact quotient, which cannot exceed one for any
/// feasible split of this parent.
pub fn scale_gain(parent: &NodeStats, raw: f64, kind: GainKind) -> Result<f64, GainError> {
    let denom = scaling_denominator(parent, kind)?;
    Ok((raw / denom).max(0.0))
}

/// Convenience: raw gain, scaled gain and child stats in one call.
pub fn evaluate_split(
    parent: &NodeStats,
    left: NodeStats,
    right: NodeStats,
    kind: GainKind,
) -> Result<SplitEvaluation, GainError> {
    let raw = raw_gain(parent, &left, &right, kind)?;
    let scaled = scale_gain(parent, raw, kind)?;
    Ok(SplitEvaluation { raw_gain: raw, scaled_gain: scaled, left_stats: left, right_stats: right })
}
