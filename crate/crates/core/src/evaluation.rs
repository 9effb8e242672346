//! Bootstrap out-of-bag risk estimation and interpretability reporting.
//!
//! Each replicate draws a with-replacement resample, fits the configured
//! procedure to it (including, when requested, the full search for the
//! penalty constant on that resample), and evaluates mean loss on the rows
//! the resample missed. The estimate is the average of those holdout losses
//! over replicates. Replicate seeds derive deterministically from the base
//! seed, so paired comparisons between procedures reuse identical draws.

use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{bootstrap_sample, Dataset, RowSet, TaskKind};
use crate::grower::{grow, GrowConfig, GrowError, NodeKind, Tree};
use crate::penalty::{BranchPath, PenaltyConstant, PenaltyKind};
use crate::rng::derive_seed;
use crate::tuning::{in_sample_loss, target_variance, tune_given_baseline, EvalError, TuneConfig};

/// How each bootstrap replicate is fit.
#[derive(Debug, Clone, PartialEq)]
pub enum FitProcedure {
    /// Grow once with a fixed configuration.
    Fixed(GrowConfig),
    /// Run the constrained constant selection on each replicate's resample.
    Tuned(TuneConfig),
}

impl FitProcedure {
    pub fn grow_config(&self) -> &GrowConfig {
        match self {
            FitProcedure::Fixed(c) => c,
            FitProcedure::Tuned(t) => &t.base,
        }
    }
}

/// Out-of-bag estimation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct OobConfig {
    /// Number of bootstrap replicates B.
    pub replicates: usize,
    pub base_seed: u64,
    pub procedure: FitProcedure,
}

/// One retained replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    pub index: usize,
    pub holdout_size: usize,
    /// Mean per-observation loss over this replicate's holdout.
    pub loss: f64,
    /// Constant selected on this replicate (tuned procedures only).
    pub k_star: Option<f64>,
}

/// Aggregated out-of-bag report.
#[derive(Debug, Clone, PartialEq)]
pub struct OobReport {
    pub replicates: Vec<ReplicateOutcome>,
    /// Replicates dropped because their holdout was empty.
    pub dropped: Vec<usize>,
    /// Mean of the retained per-replicate losses.
    pub oob_loss: f64,
    /// Mean selected constant (tuned procedures only).
    pub mean_k_star: Option<f64>,
    /// `1 - oob_loss / Var(y over the full sample)`; regression only.
    pub oob_r_squared: Option<f64>,
    /// Mean holdout fraction |H_b| / N over retained replicates.
    pub mean_holdout_frac: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OobError {
    /// Every replicate had an empty holdout.
    NoUsableReplicates,
    ZeroReplicates,
    Eval(EvalError),
}

impl fmt::Display for OobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OobError::NoUsableReplicates => write!(f, "every replicate holdout was empty"),
            OobError::ZeroReplicates => write!(f, "replicate count must be at least 1"),
            OobError::Eval(e) => write!(f, "replicate evaluation failed: {e}"),
        }
    }
}

impl core::error::Error for OobError {}

impl From<EvalError> for OobError {
    fn from(e: EvalError) -> Self {
        OobError::Eval(e)
    }
}

impl From<GrowError> for OobError {
    fn from(e: GrowError) -> Self {
        OobError::Eval(EvalError::Grow(e))
    }
}

fn fit_replicate(
    dataset: &Dataset,
    in_bag: &RowSet,
    procedure: &FitProcedure,
) -> Result<(Tree, Option<f64>), OobError> {
    match procedure {
        FitProcedure::Fixed(config) => Ok((grow(dataset, in_bag, config)?, None)),
        FitProcedure::Tuned(tc) => {
            let mut base = tc.base.clone();
            base.k = PenaltyConstant::ZERO;
            let baseline = grow(dataset, in_bag, &base)?;
            let baseline_loss = in_sample_loss(dataset, &baseline, in_bag)?;
            let result = tune_given_baseline(dataset, in_bag, tc, baseline, baseline_loss)?;
            Ok((result.tree, Some(result.k_star)))
        }
    }
}

fn summarize(
    dataset: &Dataset,
    outcomes: Vec<ReplicateOutcome>,
    dropped: Vec<usize>,
) -> Result<OobReport, OobError> {
    if outcomes.is_empty() {
        return Err(OobError::NoUsableReplicates);
    }
    let m = outcomes.len() as f64;
    let oob_loss = outcomes.iter().map(|o| o.loss).sum::<f64>() / m;
    let mean_k_star = if outcomes.iter().all(|o| o.k_star.is_some()) {
        Some(outcomes.iter().map(|o| o.k_star.unwrap()).sum::<f64>() / m)
    } else {
        None
    };
    let mean_holdout_frac = outcomes.iter().map(|o| o.holdout_size as f64).sum::<f64>()
        / (m * dataset.n_rows() as f64);
    let oob_r_squared = match dataset.task() {
        TaskKind::Regression => {
            let var = target_variance(dataset, &dataset.all_rows())?;
            Some(1.0 - oob_loss / var)
        }
        TaskKind::Classification => None,
    };
    Ok(OobReport { replicates: outcomes, dropped, oob_loss, mean_k_star, oob_r_squared, mean_holdout_frac })
}

/// Runs the out-of-bag estimate: B replicates, each fit with the configured
/// procedure on its resample and scored on its holdout.
pub fn oob_estimate(dataset: &Dataset, config: &OobConfig) -> Result<OobReport, OobError> {
    if config.replicates == 0 {
        return Err(OobError::ZeroReplicates);
    }
    let mut outcomes = Vec::with_capacity(config.replicates);
    let mut dropped = Vec::new();
    for b in 0..config.replicates {
        let seed = derive_seed(config.base_seed, b as u64);
        let (in_bag, holdout) = bootstrap_sample(dataset, seed);
        if holdout.is_empty() {
            dropped.push(b);
            continue;
        }
        let (tree, k_star) = fit_replicate(dataset, &in_bag, &config.procedure)?;
        let loss = in_sample_loss(dataset, &tree, &holdout)?;
        outcomes.push(ReplicateOutcome { index: b, holdout_size: holdout.len(), loss, k_star });
    }
    summarize(dataset, outcomes, dropped)
}

/// One row of a penalty comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub penalty: PenaltyKind,
    pub report: OobReport,
    /// `100 (L_pen - L_unpen) / L_unpen` against the unpenalized row of the
    /// same paired replicate draws.
    pub loss_increase_pct: f64,
}

/// Compares penalty families under one criterion and tuning configuration,
/// pairing replicates: every penalty sees exactly the same (resample,
/// holdout) draws, and the unpenalized baseline is fit once per replicate.
pub fn compare_penalties(
    dataset: &Dataset,
    config: &OobConfig,
    penalties: &[PenaltyKind],
) -> Result<Vec<CompareRow>, OobError> {
    if config.replicates == 0 {
        return Err(OobError::ZeroReplicates);
    }
    let tune_config = match &config.procedure {
        FitProcedure::Tuned(tc) => tc.clone(),
        FitProcedure::Fixed(gc) => TuneConfig::standard(gc.clone()),
    };
    let mut unpen_outcomes = Vec::new();
    let mut pen_outcomes: Vec<Vec<ReplicateOutcome>> =
        penalties.iter().map(|_| Vec::new()).collect();
    let mut dropped = Vec::new();

    for b in 0..config.replicates {
        let seed = derive_seed(config.base_seed, b as u64);
        let (in_bag, holdout) = bootstrap_sample(dataset, seed);
        if holdout.is_empty() {
            dropped.push(b);
            continue;
        }
        let mut base = tune_config.base.clone();
        base.penalty = PenaltyKind::None;
        base.k = PenaltyConstant::ZERO;
        let baseline = grow(dataset, &in_bag, &base)?;
        let baseline_insample = in_sample_loss(dataset, &baseline, &in_bag)?;
        let baseline_holdout = in_sample_loss(dataset, &baseline, &holdout)?;
        unpen_outcomes.push(ReplicateOutcome {
            index: b,
            holdout_size: holdout.len(),
            loss: baseline_holdout,
            k_star: None,
        });
        for (slot, &penalty) in pen_outcomes.iter_mut().zip(penalties) {
            if penalty == PenaltyKind::None {
                slot.push(ReplicateOutcome {
                    index: b,
                    holdout_size: holdout.len(),
                    loss: baseline_holdout,
                    k_star: None,
                });
                continue;
            }
            let mut tc = tune_config.clone();
            tc.base.penalty = penalty;
            let result = tune_given_baseline(
                dataset,
                &in_bag,
                &tc,
                baseline.clone(),
                baseline_insample,
            )?;
            let loss = in_sample_loss(dataset, &result.tree, &holdout)?;
            slot.push(ReplicateOutcome {
                index: b,
                holdout_size: holdout.len(),
                loss,
                k_star: Some(result.k_star),
            });
        }
    }

    let unpen = summarize(dataset, unpen_outcomes, dropped.clone())?;
    let mut rows = Vec::with_capacity(penalties.len());
    for (outcomes, &penalty) in pen_outcomes.into_iter().zip(penalties) {
        let report = summarize(dataset, outcomes, dropped.clone())?;
        let loss_increase_pct = if unpen.oob_loss == 0.0 {
            if report.oob_loss == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            100.0 * (report.oob_loss - unpen.oob_loss) / unpen.oob_loss
        };
        rows.push(CompareRow { penalty, report, loss_increase_pct });
    }
    Ok(rows)
}

/// Interpretability summary of a grown tree, computed from each terminal's
/// branch variable sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpretabilityMetrics {
    /// Distinct variables used on the path to each terminal.
    pub per_terminal_distinct: Vec<usize>,
    pub max_distinct: usize,
    pub mean_distinct: f64,
    /// Distinct variables used anywhere in the tree.
    pub total_distinct: usize,
    /// Adjacent unequal pairs in each terminal's branch sequence.
    pub per_terminal_switches: Vec<usize>,
}

fn distinct_count(branch: &BranchPath) -> usize {
    let vars = branch.variables();
    let mut n = 0;
    for (i, v) in vars.iter().enumerate() {
        if !vars[..i].contains(v) {
            n += 1;
        }
    }
    n
}

fn switch_count(branch: &BranchPath) -> usize {
    branch.variables().windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn interpretability_metrics(tree: &Tree) -> InterpretabilityMetrics {
    let terminals = tree.root.terminals();
    let per_terminal_distinct: Vec<usize> =
        terminals.iter().map(|t| distinct_count(&t.branch)).collect();
    let per_terminal_switches: Vec<usize> =
        terminals.iter().map(|t| switch_count(&t.branch)).collect();
    let max_distinct = per_terminal_distinct.iter().copied().max().unwrap_or(0);
    let mean_distinct = if per_terminal_distinct.is_empty() {
        0.0
    } else {
        per_terminal_distinct.iter().sum::<usize>() as f64 / per_terminal_distinct.len() as f64
    };
    let mut used = Vec::new();
    tree.root.walk(&mut |node| {
        if let NodeKind::Internal { rule, .. } = &node.kind {
            if !used.contains(&rule.variable) {
                used.push(rule.variable);
            }
        }
    });
    InterpretabilityMetrics {
        per_terminal_distinct,
        max_distinct,
        mean_distinct,
        total_distinct: used.len(),
        per_terminal_switches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Target;
    use crate::gain::GainKind;
    use alloc::string::ToString;
    use alloc::vec;

    fn step_dataset(n_per_side: usize) -> Dataset {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..n_per_side {
            xs.push(i as f64 * 0.01);
            ys.push(1.0);
        }
        for i in 0..n_per_side {
            xs.push(10.0 + i as f64 * 0.01);
            ys.push(5.0);
        }
        Dataset::from_parts(vec!["x".to_string()], xs, Target::Regression(ys), vec![]).unwrap()
    }

    #[test]
    fn perfect_procedure_scores_zero() {
        // the step is learnable from any resample that keeps both sides,
        // and with 20 rows a side every seed below does
        let ds = step_dataset(20);
        let config = OobConfig {
            replicates: 1,
            base_seed: 11,
            procedure: FitProcedure::Fixed(GrowConfig::unpenalized(GainKind::CartRegression)),
        };
        let report = oob_estimate(&ds, &config).unwrap();
        assert_eq!(report.replicates.len(), 1);
        assert_eq!(report.oob_loss, 0.0);
        assert_eq!(report.oob_r_squared, Some(1.0));
    }

    #[test]
    fn oob_estimate_deterministic() {
        let ds = step_dataset(10);
        let config = OobConfig {
            replicates: 5,
            base_seed: 42,
            procedure: FitProcedure::Fixed(GrowConfig::unpenalized(GainKind::CartRegression)),
        };
        let a = oob_estimate(&ds, &config).unwrap();
        let b = oob_estimate(&ds, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn loss_is_holdout_mean() {
        // recompute one replicate by hand
        let ds = step_dataset(10);
        let config = OobConfig {
            replicates: 3,
            base_seed: 9,
            procedure: FitProcedure::Fixed(GrowConfig::unpenalized(GainKind::CartRegression)),
        };
        let report = oob_estimate(&ds, &config).unwrap();
        for outcome in &report.replicates {
            let seed = derive_seed(9, outcome.index as u64);
            let (in_bag, holdout) = bootstrap_sample(&ds, seed);
            assert_eq!(holdout.len(), outcome.holdout_size);
            let tree = grow(&ds, &in_bag, &GrowConfig::unpenalized(GainKind::CartRegression))
                .unwrap();
            let loss = in_sample_loss(&ds, &tree, &holdout).unwrap();
            assert_eq!(loss, outcome.loss);
        }
        let mean = report.replicates.iter().map(|o| o.loss).sum::<f64>()
            / report.replicates.len() as f64;
        assert_eq!(mean, report.oob_loss);
    }

    #[test]
    fn compare_none_with_itself_is_flat() {
        let ds = step_dataset(10);
        let config = OobConfig {
            replicates: 4,
            base_seed: 5,
            procedure: FitProcedure::Fixed(GrowConfig::unpenalized(GainKind::CartRegression)),
        };
        let rows = compare_penalties(&ds, &config, &[PenaltyKind::None]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].loss_increase_pct, 0.0);
    }

    #[test]
    fn branch_metrics() {
        // rm, lstat, rm, lstat analog: distinct 2, switches 3
        let branch = BranchPath::from_variables(vec![5, 12, 5, 12]);
        assert_eq!(distinct_count(&branch), 2);
        assert_eq!(switch_count(&branch), 3);
        assert_eq!(distinct_count(&BranchPath::root()), 0);
        assert_eq!(switch_count(&BranchPath::root()), 0);
    }

    #[test]
    fn metrics_on_trees() {
        // root-only tree: all zeros
        let ds = Dataset::from_parts(
            vec!["x".to_string()],
            vec![1.0],
            Target::Regression(vec![2.0]),
            vec![],
        )
        .unwrap();
        let tree =
            grow(&ds, &ds.all_rows(), &GrowConfig::unpenalized(GainKind::CartRegression))
                .unwrap();
        let m = interpretability_metrics(&tree);
        assert_eq!(m.max_distinct, 0);
        assert_eq!(m.total_distinct, 0);
        assert_eq!(m.per_terminal_distinct, vec![0]);

        // single-variable tree: total distinct = 1
        let ds = step_dataset(10);
        let tree =
            grow(&ds, &ds.all_rows(), &GrowConfig::unpenalized(GainKind::CartRegression))
                .unwrap();
        let m = interpretability_metrics(&tree);
        assert_eq!(m.total_distinct, 1);
    }
}
