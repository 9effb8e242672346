//! Loss-constrained selection of the penalty constant.
//!
//! The rule: fit the unpenalized tree, then pick the largest grid value `k`
//! whose penalized tree keeps the in-sample loss within a factor `(1 + c)`
//! of the unpenalized loss. In-sample loss is not monotone in `k` (the
//! penalty reshapes the tree nonconvexly), so every grid point is fitted
//! and evaluated; no bisection shortcut is sound.

use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{Dataset, RowSet, TaskKind};
use crate::grower::{grow, predict, FittedValue, GrowConfig, GrowError, Tree};
use crate::penalty::PenaltyConstant;

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// Tree task differs from the dataset task.
    TaskMismatch,
    EmptyRows,
    Grow(GrowError),
    /// Grid not strictly ascending inside [0, 1], or c < 0.
    BadTuneConfig,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::TaskMismatch => write!(f, "tree and dataset task differ"),
            EvalError::EmptyRows => write!(f, "no rows to evaluate"),
            EvalError::Grow(e) => write!(f, "grow failed: {e}"),
            EvalError::BadTuneConfig => write!(f, "invalid tuning configuration"),
        }
    }
}

impl core::error::Error for EvalError {}

impl From<GrowError> for EvalError {
    fn from(e: GrowError) -> Self {
        EvalError::Grow(e)
    }
}

/// Mean per-observation loss of a tree over the given rows: mean squared
/// error for regression, misclassified fraction for classification.
pub fn in_sample_loss(dataset: &Dataset, tree: &Tree, rows: &RowSet) -> Result<f64, EvalError> {
    if rows.is_empty() {
        return Err(EvalError::EmptyRows);
    }
    if tree.task != dataset.task() {
        return Err(EvalError::TaskMismatch);
    }
    let mut total = 0.0;
    for i in rows.iter() {
        let fitted = predict(tree, dataset.row(i)).map_err(|_| EvalError::TaskMismatch)?;
        match (fitted, dataset.task()) {
            (FittedValue::Regression(v), TaskKind::Regression) => {
                let r = dataset.y(i) - v;
                total += r * r;
            }
            (FittedValue::Class(c), TaskKind::Classification) => {
                if c != dataset.class(i) {
                    total += 1.0;
                }
            }
            _ => return Err(EvalError::TaskMismatch),
        }
    }
    Ok(total / rows.len() as f64)
}

/// `1 - MSE / Var(y over rows)` for regression trees; a perfect fit on a
/// constant target reports 1.
pub fn r_squared(dataset: &Dataset, tree: &Tree, rows: &RowSet) -> Result<f64, EvalError> {
    if dataset.task() != TaskKind::Regression {
        return Err(EvalError::TaskMismatch);
    }
    let mse = in_sample_loss(dataset, tree, rows)?;
    let var = target_variance(dataset, rows)?;
    if mse == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - mse / var)
}

/// Biased variance of the regression target over the given rows.
pub fn target_variance(dataset: &Dataset, rows: &RowSet) -> Result<f64, EvalError> {
    if rows.is_empty() {
        return Err(EvalError::EmptyRows);
    }
    if dataset.task() != TaskKind::Regression {
        return Err(EvalError::TaskMismatch);
    }
    let n = rows.len() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for i in rows.iter() {
        let y = dataset.y(i);
        sum += y;
        sum_sq += y * y;
    }
    let mean = sum / n;
    Ok((sum_sq / n - mean * mean).max(0.0))
}

/// Tuning configuration: the grid of candidate constants, the loss slack
/// `c`, and the criterion/penalty being tuned (whose own `k` is ignored).
#[derive(Debug, Clone, PartialEq)]
pub struct TuneConfig {
    pub k_grid: Vec<f64>,
    pub c: f64,
    pub base: GrowConfig,
}

impl TuneConfig {
    pub fn new(k_grid: Vec<f64>, c: f64, base: GrowConfig) -> Result<Self, EvalError> {
        if c < 0.0
            || k_grid.is_empty()
            || k_grid.iter().any(|k| !(0.0..=1.0).contains(k))
            || k_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(EvalError::BadTuneConfig);
        }
        Ok(TuneConfig { k_grid, c, base })
    }

    /// The grid 0.01, 0.02, ..., 0.99 with c = 0.10.
    pub fn standard(base: GrowConfig) -> Self {
        TuneConfig { k_grid: default_grid(), c: 0.10, base }
    }
}

/// 0.01, 0.02, ..., 0.99.
pub fn default_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

/// Grid from `start` to `end` inclusive in steps of `step` (values snapped
/// to two decimals to keep grids like 0.05, 0.10, ... exact).
pub fn grid_from_spec(start: f64, step: f64, end: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 0u32;
    loop {
        let k = start + step * i as f64;
        if k > end + 1e-12 {
            break;
        }
        out.push(libm::round(k * 100.0) / 100.0);
        i += 1;
    }
    out
}

/// The outcome of a tuning run.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    /// Selected constant: a grid element, or 0 when no grid point qualifies.
    pub k_star: f64,
    pub unpenalized_loss: f64,
    pub tuned_loss: f64,
    /// Per-k in-sample losses, (0, unpenalized loss) first.
    pub trace: Vec<(f64, f64)>,
    pub tree: Tree,
}

/// Runs the constrained selection over the grid and returns the tree grown
/// at the chosen constant. `k = 0` always qualifies, so the unpenalized
/// tree is the fallback when every grid point breaches the threshold.
pub fn tune(dataset: &Dataset, learning: &RowSet, config: &TuneConfig) -> Result<TuneResult, EvalError> {
    let mut base_config = config.base.clone();
    base_config.k = PenaltyConstant::ZERO;
    let baseline = grow(dataset, learning, &base_config)?;
    let baseline_loss = in_sample_loss(dataset, &baseline, learning)?;
    tune_given_baseline(dataset, learning, config, baseline, baseline_loss)
}

pub(crate) fn tune_given_baseline(
    dataset: &Dataset,
    learning: &RowSet,
    config: &TuneConfig,
    baseline: Tree,
    baseline_loss: f64,
) -> Result<TuneResult, EvalError> {
    let threshold = (1.0 + config.c) * baseline_loss;
    let mut trace = Vec::with_capacity(config.k_grid.len() + 1);
    trace.push((0.0, baseline_loss));
    let mut k_star = 0.0;
    let mut tuned_loss = baseline_loss;
    let mut tuned_tree = baseline;
    for &k in &config.k_grid {
        let mut grow_config = config.base.clone();
        grow_config.k = PenaltyConstant::new(k).map_err(|_| EvalError::BadTuneConfig)?;
        let tree = grow(dataset, learning, &grow_config)?;
        let loss = in_sample_loss(dataset, &tree, learning)?;
        trace.push((k, loss));
        if loss <= threshold {
            k_star = k;
            tuned_loss = loss;
            tuned_tree = tree;
        }
    }
    Ok(TuneResult { k_star, unpenalized_loss: baseline_loss, tuned_loss, trace, tree: tuned_tree })
}

/// The largest k in an ascending trace whose loss is within the threshold;
/// 0 when none is. Factored out for direct testing of the selection rule.
pub fn k_star_from_trace(trace: &[(f64, f64)], threshold: f64) -> f64 {
    let mut k_star = 0.0;
    for &(k, loss) in trace {
        if loss <= threshold {
            k_star = k;
        }
    }
    k_star
}
