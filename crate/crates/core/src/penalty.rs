//! Interpretability penalties on the scaled split gain.

use alloc::vec::Vec;
use core::fmt;

/// Ordered split variables from the root to the current node.
///
/// Repeats are kept with their positions: the EMA penalty weights each
/// branch level separately, and membership for the new-variable penalty
/// falls out of the same record.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BranchPath {
    variables: Vec<usize>,
}

impl BranchPath {
    /// The empty path of the root node.
    pub fn root() -> Self {
        BranchPath { variables: Vec::new() }
    }

    pub fn from_variables(variables: Vec<usize>) -> Self {
        BranchPath { variables }
    }

    /// Depth `d` of the node this path leads to.
    pub fn depth(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn contains(&self, variable: usize) -> bool {
        self.variables.contains(&variable)
    }

    /// The child path after splitting on `variable`.
    pub fn child(&self, variable: usize) -> Self {
        let mut variables = self.variables.clone();
        variables.push(variable);
        BranchPath { variables }
    }
}

/// Penalty family. `None` is the unpenalized criterion (gamma identically 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyKind {
    None,
    NewVariable,
    Ema,
}

/// The tradeoff constant `k`, restricted to `[0, 1]` because it is
/// subtracted from a gain that lives in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConstant(f64);

#[derive(Debug, Clone, PartialEq)]
pub struct InvalidConstant(pub f64);

impl fmt::Display for InvalidConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "penalty constant {} outside [0, 1]", self.0)
    }
}

impl core::error::Error for InvalidConstant {}

impl PenaltyConstant {
    pub fn new(k: f64) -> Result<Self, InvalidConstant> {
        if (0.0..=1.0).contains(&k) {
            Ok(PenaltyConstant(k))
        } else {
            Err(InvalidConstant(k))
        }
    }

    pub const ZERO: PenaltyConstant = PenaltyConstant(0.0);

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The penalty `gamma` charged for splitting on `split_variable` below the
/// given branch. Always in `[0, 1]`.
///
/// New-variable: a flat `k` if the variable has not appeared in the branch,
/// otherwise 0. EMA: one indicator per branch level, each weighted
/// `k (1-k)^(d-1-j)`, so disagreeing with the parent costs `k` and the
/// weights decay toward the root; the root split is never penalized.
pub fn penalty(
    kind: PenaltyKind,
    k: PenaltyConstant,
    branch: &BranchPath,
    split_variable: usize,
) -> f64 {
    let k = k.value();
    match kind {
        PenaltyKind::None => 0.0,
        PenaltyKind::NewVariable => {
            if branch.contains(split_variable) {
                0.0
            } else {
                k
            }
        }
        PenaltyKind::Ema => {
            // Walk from the parent (weight k) toward the root, decaying by
            // (1 - k) per level.
            let mut weight = k;
            let mut gamma = 0.0;
            for &s_j in branch.variables().iter().rev() {
                if s_j != split_variable {
                    gamma += weight;
                }
                weight *= 1.0 - k;
            }
            gamma
        }
    }
}

/// The penalized objective `scaled_gain - gamma`.
///
/// A node splits only when some candidate scores strictly above 0: not
/// splitting is itself a member of the candidate set with score 0, and ties
/// with it resolve to "do not split".
pub fn penalized_objective(scaled_gain: f64, gamma: f64) -> f64 {
    scaled_gain - gamma
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn k(v: f64) -> PenaltyConstant {
        PenaltyConstant::new(v).unwrap()
    }

    #[test]
    fn ema_reuse_parent_variable() {
        // branch [a, b, a], candidate a: only the middle level disagrees,
        // weight k (1-k) = 0.15 * 0.85 = 0.1275
        let branch = BranchPath::from_variables(vec![0, 1, 0]);
        let g = penalty(PenaltyKind::Ema, k(0.15), &branch, 0);
        assert!((g - 0.1275).abs() < 1e-12);
    }

    #[test]
    fn ema_new_variable_geometric_sum() {
        // all three indicators fire: 1 - 0.85^3 = 0.385875
        let branch = BranchPath::from_variables(vec![0, 1, 0]);
        let g = penalty(PenaltyKind::Ema, k(0.15), &branch, 7);
        assert!((g - 0.385875).abs() < 1e-12);
    }

    #[test]
    fn ema_root_unpenalized() {
        assert_eq!(penalty(PenaltyKind::Ema, k(0.3), &BranchPath::root(), 2), 0.0);
    }

    #[test]
    fn new_variable_membership() {
        let branch = BranchPath::from_variables(vec![3, 1]);
        assert_eq!(penalty(PenaltyKind::NewVariable, k(0.25), &branch, 1), 0.0);
        assert_eq!(penalty(PenaltyKind::NewVariable, k(0.25), &branch, 2), 0.25);
    }

    #[test]
    fn zero_constant_recovers_unpenalized() {
        let branch = BranchPath::from_variables(vec![0, 1, 2]);
        for kind in [PenaltyKind::None, PenaltyKind::NewVariable, PenaltyKind::Ema] {
            assert_eq!(penalty(kind, PenaltyConstant::ZERO, &branch, 9), 0.0);
        }
    }

    #[test]
    fn ema_is_order_sensitive() {
        let ab = BranchPath::from_variables(vec![0, 1]);
        let ba = BranchPath::from_variables(vec![1, 0]);
        let g_ab = penalty(PenaltyKind::Ema, k(0.4), &ab, 0);
        let g_ba = penalty(PenaltyKind::Ema, k(0.4), &ba, 0);
        // candidate a disagrees with the parent in [a, b] but with the root in [b, a]
        assert!((g_ab - 0.4).abs() < 1e-12);
        assert!((g_ba - 0.4 * 0.6).abs() < 1e-12);
        assert!(g_ab > g_ba);
    }

    #[test]
    fn new_variable_ignores_order() {
        let ab = BranchPath::from_variables(vec![0, 1]);
        let ba = BranchPath::from_variables(vec![1, 0]);
        for var in 0..4 {
            assert_eq!(
                penalty(PenaltyKind::NewVariable, k(0.5), &ab, var),
                penalty(PenaltyKind::NewVariable, k(0.5), &ba, var)
            );
        }
    }

    #[test]
    fn objective_examples() {
        assert!((penalized_objective(0.350649, 0.0) - 0.350649).abs() < 1e-15);
        assert!((penalized_objective(0.350649, 0.27) - 0.080649).abs() < 1e-12);
        assert!(penalized_objective(0.05, 0.27) < 0.0);
    }

    #[test]
    fn constant_range_enforced() {
        assert!(PenaltyConstant::new(-0.1).is_err());
        assert!(PenaltyConstant::new(1.1).is_err());
        assert_eq!(PenaltyConstant::new(1.0).unwrap().value(), 1.0);
    }
}
