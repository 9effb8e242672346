//! In-memory tabular samples and row-subset views.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rng::SplitMix64;

/// Whether the target is a real value or a class index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Regression,
    Classification,
}

/// Target column of a [`Dataset`].
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// One real value per row.
    Regression(Vec<f64>),
    /// One class index per row, each `< n_classes`.
    Classification { classes: Vec<usize>, n_classes: usize },
}

/// A column-typed sample of `n_rows` observations over `n_features`
/// numeric predictors and one target.
///
/// Immutable after construction; all values are finite. Categorical
/// predictors must be pre-encoded by the caller, and missing values are a
/// construction error rather than a representable state.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    /// Row-major `n_rows * n_features` matrix.
    features: Vec<f64>,
    target: Target,
    /// Original label strings, classification only (index = class index).
    class_labels: Vec<String>,
    n_rows: usize,
    n_features: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetError {
    /// A feature value is NaN or infinite; payload is (row, column).
    NonFiniteFeature { row: usize, column: usize },
    /// A regression target is NaN or infinite; payload is the row.
    NonFiniteTarget { row: usize },
    /// A class index is out of range; payload is (row, index, n_classes).
    ClassOutOfRange { row: usize, class: usize, n_classes: usize },
    /// Classification needs at least two classes.
    SingleClass,
    /// No rows.
    EmptyDataset,
    /// Feature matrix length disagrees with names/target lengths.
    ShapeMismatch,
    /// Duplicate or empty feature name.
    BadFeatureName { column: usize },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::NonFiniteFeature { row, column } => {
                write!(f, "non-finite feature value at row {row}, column {column}")
            }
            DatasetError::NonFiniteTarget { row } => {
                write!(f, "non-finite target value at row {row}")
            }
            DatasetError::ClassOutOfRange { row, class, n_classes } => write!(
                f,
                "class index {class} at row {row} out of range for {n_classes} classes"
            ),
            DatasetError::SingleClass => write!(f, "classification requires at least 2 classes"),
            DatasetError::EmptyDataset => write!(f, "dataset has no rows"),
            DatasetError::ShapeMismatch => write!(f, "feature matrix shape mismatch"),
            DatasetError::BadFeatureName { column } => {
                write!(f, "feature name at column {column} is empty or duplicated")
            }
        }
    }
}

impl core::error::Error for DatasetError {}

impl Dataset {
    /// Builds a dataset from a row-major feature matrix, validating every
    /// invariant (finite values, consistent shapes, unique nonempty names,
    /// in-range class indices, at least two classes for classification).
    pub fn from_parts(
        feature_names: Vec<String>,
        features: Vec<f64>,
        target: Target,
        class_labels: Vec<String>,
    ) -> Result<Self, DatasetError> {
        let n_features = feature_names.len();
        let n_rows = match &target {
            Target::Regression(ys) => ys.len(),
            Target::Classification { classes, .. } => classes.len(),
        };
        if n_rows == 0 {
            return Err(DatasetError::EmptyDataset);
        }
        if features.len() != n_rows * n_features {
            return Err(DatasetError::ShapeMismatch);
        }
        for (i, name) in feature_names.iter().enumerate() {
            if name.is_empty() || feature_names[..i].contains(name) {
                return Err(DatasetError::BadFeatureName { column: i });
            }
        }
        for (pos, v) in features.iter().enumerate() {
            if !v.is_finite() {
                return Err(DatasetError::NonFiniteFeature {
                    row: pos / n_features.max(1),
                    column: pos % n_features.max(1),
                });
            }
        }
        match &target {
            Target::Regression(ys) => {
                for (row, y) in ys.iter().enumerate() {
                    if !y.is_finite() {
                        return Err(DatasetError::NonFiniteTarget { row });
                    }
                }
                if !class_labels.is_empty() {
                    return Err(DatasetError::ShapeMismatch);
                }
            }
            Target::Classification { classes, n_classes } => {
                if *n_classes < 2 {
                    return Err(DatasetError::SingleClass);
                }
                if class_labels.len() != *n_classes {
                    return Err(DatasetError::ShapeMismatch);
                }
                for (row, &c) in classes.iter().enumerate() {
                    if c >= *n_classes {
                        return Err(DatasetError::ClassOutOfRange {
                            row,
                            class: c,
                            n_classes: *n_classes,
                        });
                    }
                }
            }
        }
        Ok(Dataset { feature_names, features, target, class_labels, n_rows, n_features })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    pub fn task(&self) -> TaskKind {
        match self.target {
            Target::Regression(_) => TaskKind::Regression,
            Target::Classification { .. } => TaskKind::Classification,
        }
    }

    pub fn n_classes(&self) -> usize {
        match &self.target {
            Target::Regression(_) => 0,
            Target::Classification { n_classes, .. } => *n_classes,
        }
    }

    /// Feature value at (row, column).
    #[inline]
    pub fn feature(&self, row: usize, column: usize) -> f64 {
        self.features[row * self.n_features + column]
    }

    /// One full feature row.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.features[row * self.n_features..(row + 1) * self.n_features]
    }

    /// Regression target at a row; panics on classification datasets.
    #[inline]
    pub fn y(&self, row: usize) -> f64 {
        match &self.target {
            Target::Regression(ys) => ys[row],
            Target::Classification { .. } => panic!("y() on a classification dataset"),
        }
    }

    /// Class index at a row; panics on regression datasets.
    #[inline]
    pub fn class(&self, row: usize) -> usize {
        match &self.target {
            Target::Regression(_) => panic!("class() on a regression dataset"),
            Target::Classification { classes, .. } => classes[row],
        }
    }

    /// RowSet covering the whole sample in row order.
    pub fn all_rows(&self) -> RowSet {
        RowSet::new((0..self.n_rows).collect())
    }
}

/// An ordered list of row indices into a dataset.
///
/// Duplicates are allowed so the same type can describe bootstrap resamples;
/// operations over a RowSet count duplicated rows with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSet {
    indices: Vec<usize>,
}

impl RowSet {
    pub fn new(indices: Vec<usize>) -> Self {
        RowSet { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }
}

/// Draws one bootstrap replicate: `in_bag` holds exactly `n_rows` indices
/// sampled uniformly with replacement (in draw order), `out_of_bag` every
/// index not drawn, each once, ascending.
///
/// The draw is a pure function of `(dataset size, seed)`.
pub fn bootstrap_sample(dataset: &Dataset, seed: u64) -> (RowSet, RowSet) {
    let n = dataset.n_rows();
    let mut gen = SplitMix64::new(seed);
    let mut in_bag = Vec::with_capacity(n);
    let mut seen = alloc::vec![false; n];
    for _ in 0..n {
        let idx = gen.next_below(n as u64) as usize;
        seen[idx] = true;
        in_bag.push(idx);
    }
    let out_of_bag: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
    (RowSet::new(in_bag), RowSet::new(out_of_bag))
}
