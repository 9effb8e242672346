//! Model files: a versioned JSON document with a canonical rendering.
//!
//! Canonical form: object keys sorted, no insignificant whitespace, numbers
//! in shortest round-trip decimal form. Serializing a freshly deserialized
//! document reproduces the input byte for byte, which keeps golden files and
//! diffs stable.

use serde::Deserialize;

use treepen_core::{
    ClassImpurity, FittedValue, GainKind, GrowConfig, NodeKind, PenaltyConstant, PenaltyKind,
    SplitRule, TaskKind, Tree, TreeNode,
};

use crate::error::DataError;

pub const FORMAT_VERSION: u64 = 1;

/// Training-time summary stored alongside the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSummary {
    pub n: usize,
    /// MSE for regression, misclassification rate for classification.
    pub in_sample_loss: f64,
    /// Regression only.
    pub r_squared: Option<f64>,
}

/// Writes the canonical JSON document for a grown tree.
pub fn serialize(tree: &Tree, training: &TrainingSummary) -> String {
    let mut out = String::with_capacity(4096);
    out.push('{');
    push_key(&mut out, "class_labels");
    push_string_array(&mut out, &tree.class_labels);
    out.push(',');
    push_key(&mut out, "config");
    push_config(&mut out, tree);
    out.push(',');
    push_key(&mut out, "feature_names");
    push_string_array(&mut out, &tree.feature_names);
    out.push(',');
    push_key(&mut out, "format_version");
    out.push_str(&FORMAT_VERSION.to_string());
    out.push(',');
    push_key(&mut out, "root");
    push_node(&mut out, &tree.root, tree);
    out.push(',');
    push_key(&mut out, "task");
    push_json_string(
        &mut out,
        match tree.task {
            TaskKind::Regression => "regression",
            TaskKind::Classification => "classification",
        },
    );
    out.push(',');
    push_key(&mut out, "training");
    out.push('{');
    push_key(&mut out, "in_sample_loss");
    push_number(&mut out, training.in_sample_loss);
    out.push(',');
    push_key(&mut out, "n");
    out.push_str(&training.n.to_string());
    if let Some(r2) = training.r_squared {
        out.push(',');
        push_key(&mut out, "r_squared");
        push_number(&mut out, r2);
    }
    out.push('}');
    out.push('}');
    out
}

fn push_key(out: &mut String, key: &str) {
    push_json_string(out, key);
    out.push(':');
}

fn push_json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn push_string_array(out: &mut String, items: &[String]) {
    out.push('[');
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_json_string(out, item);
    }
    out.push(']');
}

fn push_number(out: &mut String, v: f64) {
    // shortest round-trip decimal form; the tree never holds non-finite values
    debug_assert!(v.is_finite());
    out.push_str(&format!("{v}"));
}

fn push_config(out: &mut String, tree: &Tree) {
    let (criterion, impurity, class_of_interest) = criterion_parts(tree.config.gain);
    out.push('{');
    push_key(out, "class_of_interest");
    match class_of_interest {
        Some(k) => push_json_string(out, &tree.class_labels[k]),
        None => out.push_str("null"),
    }
    out.push(',');
    push_key(out, "criterion");
    push_json_string(out, criterion);
    out.push(',');
    push_key(out, "impurity");
    match impurity {
        Some(name) => push_json_string(out, name),
        None => out.push_str("null"),
    }
    out.push(',');
    push_key(out, "k");
    push_number(out, tree.config.k.value());
    out.push(',');
    push_key(out, "min_node_fraction");
    push_number(out, tree.config.min_node_fraction);
    out.push(',');
    push_key(out, "penalty");
    push_json_string(
        out,
        match tree.config.penalty {
            PenaltyKind::None => "none",
            PenaltyKind::NewVariable => "new-variable",
            PenaltyKind::Ema => "ema",
        },
    );
    out.push('}');
}

fn criterion_parts(gain: GainKind) -> (&'static str, Option<&'static str>, Option<usize>) {
    match gain {
        GainKind::CartRegression => ("cart", None, None),
        GainKind::CartClassification(ClassImpurity::Gini) => ("cart", Some("gini"), None),
        GainKind::CartClassification(ClassImpurity::CrossEntropy) => {
            ("cart", Some("entropy"), None)
        }
        GainKind::OneSidedPurityRegression | GainKind::OneSidedPurityClassification => {
            ("os-purity", None, None)
        }
        GainKind::HighMeans => ("high-means", None, None),
        GainKind::LowMeans => ("low-means", None, None),
        GainKind::OneSidedExtremeClassification(k) => ("os-extreme", None, Some(k)),
    }
}

fn push_node(out: &mut String, node: &TreeNode, tree: &Tree) {
    out.push('{');
    match &node.kind {
        NodeKind::Internal { rule, left, right } => {
            push_key(out, "impurity");
            push_number(out, node.impurity);
            out.push(',');
            push_key(out, "left");
            push_node(out, left, tree);
            out.push(',');
            push_key(out, "n");
            out.push_str(&node.n.to_string());
            out.push(',');
            push_key(out, "right");
            push_node(out, right, tree);
            out.push(',');
            push_key(out, "threshold");
            push_number(out, rule.threshold);
            out.push(',');
            push_key(out, "variable");
            push_json_string(out, &tree.feature_names[rule.variable]);
        }
        NodeKind::Terminal { fitted } => {
            match fitted {
                FittedValue::Regression(v) => {
                    push_key(out, "fitted");
                    push_number(out, *v);
                }
                FittedValue::Class(c) => {
                    push_key(out, "fitted_class");
                    push_json_string(out, &tree.class_labels[*c]);
                }
            }
            out.push(',');
            push_key(out, "impurity");
            push_number(out, node.impurity);
            out.push(',');
            push_key(out, "n");
            out.push_str(&node.n.to_string());
        }
    }
    out.push('}');
}

// ---------------------------------------------------------------------------
// Deserialization

#[derive(Debug, Deserialize)]
struct DocDe {
    format_version: u64,
    task: String,
    feature_names: Vec<String>,
    #[serde(default)]
    class_labels: Vec<String>,
    config: ConfigDe,
    root: NodeDe,
    training: TrainingDe,
}

#[derive(Debug, Deserialize)]
struct ConfigDe {
    criterion: String,
    impurity: Option<String>,
    class_of_interest: Option<String>,
    penalty: String,
    k: f64,
    min_node_fraction: f64,
}

#[derive(Debug, Deserialize)]
struct TrainingDe {
    n: usize,
    in_sample_loss: f64,
    #[serde(default)]
    r_squared: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct NodeDe {
    #[serde(default)]
    variable: Option<String>,
    #[serde(default)]
    threshold: Option<f64>,
    #[serde(default)]
    left: Option<Box<NodeDe>>,
    #[serde(default)]
    right: Option<Box<NodeDe>>,
    #[serde(default)]
    fitted: Option<f64>,
    #[serde(default)]
    fitted_class: Option<String>,
    #[serde(default)]
    impurity: Option<f64>,
    n: usize,
}

/// Parses a model document back into a tree and its training summary.
pub fn deserialize(text: &str) -> Result<(Tree, TrainingSummary), DataError> {
    let doc: DocDe =
        serde_json::from_str(text).map_err(|e| DataError::Model(e.to_string()))?;
    if doc.format_version != FORMAT_VERSION {
        return Err(DataError::Model(format!(
            "unsupported format_version {} (expected {FORMAT_VERSION})",
            doc.format_version
        )));
    }
    let task = match doc.task.as_str() {
        "regression" => TaskKind::Regression,
        "classification" => TaskKind::Classification,
        other => return Err(DataError::Model(format!("unknown task '{other}'"))),
    };
    let class_of_interest = match &doc.config.class_of_interest {
        None => None,
        Some(label) => Some(
            doc.class_labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| DataError::UnknownClass { label: label.clone() })?,
        ),
    };
    let gain = gain_from_parts(
        &doc.config.criterion,
        doc.config.impurity.as_deref(),
        class_of_interest,
        task,
    )?;
    let penalty = match doc.config.penalty.as_str() {
        "none" => PenaltyKind::None,
        "new-variable" => PenaltyKind::NewVariable,
        "ema" => PenaltyKind::Ema,
        other => return Err(DataError::Model(format!("unknown penalty '{other}'"))),
    };
    let k = PenaltyConstant::new(doc.config.k)
        .map_err(|e| DataError::Model(e.to_string()))?;
    let config = GrowConfig::new(gain, penalty, k, doc.config.min_node_fraction)
        .map_err(|e| DataError::Model(e.to_string()))?;
    let root = node_from_doc(
        &doc.root,
        &doc.feature_names,
        &doc.class_labels,
        task,
        treepen_core::BranchPath::root(),
        0,
    )?;
    let tree = Tree {
        root,
        config,
        feature_names: doc.feature_names,
        task,
        n_training: doc.training.n,
        class_labels: doc.class_labels,
    };
    let training = TrainingSummary {
        n: doc.training.n,
        in_sample_loss: doc.training.in_sample_loss,
        r_squared: doc.training.r_squared,
    };
    Ok((tree, training))
}

/// Maps the document vocabulary back onto a gain kind.
pub fn gain_from_parts(
    criterion: &str,
    impurity: Option<&str>,
    class_of_interest: Option<usize>,
    task: TaskKind,
) -> Result<GainKind, DataError> {
    let gain = match (criterion, task) {
        ("cart", TaskKind::Regression) => GainKind::CartRegression,
        ("cart", TaskKind::Classification) => match impurity {
            None | Some("gini") => GainKind::CartClassification(ClassImpurity::Gini),
            Some("entropy") => GainKind::CartClassification(ClassImpurity::CrossEntropy),
            Some(other) => {
                return Err(DataError::Model(format!("unknown impurity '{other}'")))
            }
        },
        ("os-purity", TaskKind::Regression) => GainKind::OneSidedPurityRegression,
        ("os-purity", TaskKind::Classification) => GainKind::OneSidedPurityClassification,
        ("high-means", TaskKind::Regression) => GainKind::HighMeans,
        ("low-means", TaskKind::Regression) => GainKind::LowMeans,
        ("os-extreme", TaskKind::Classification) => {
            let k = class_of_interest.ok_or_else(|| {
                DataError::Model("os-extreme requires a class of interest".to_string())
            })?;
            GainKind::OneSidedExtremeClassification(k)
        }
        (c, _) => {
            return Err(DataError::Model(format!(
                "criterion '{c}' does not apply to this task"
            )))
        }
    };
    Ok(gain)
}

fn node_from_doc(
    node: &NodeDe,
    feature_names: &[String],
    class_labels: &[String],
    task: TaskKind,
    branch: treepen_core::BranchPath,
    depth: usize,
) -> Result<TreeNode, DataError> {
    let impurity = node.impurity.unwrap_or(0.0);
    match (&node.variable, &node.left, &node.right) {
        (Some(name), Some(left), Some(right)) => {
            let variable = feature_names
                .iter()
                .position(|f| f == name)
                .ok_or_else(|| DataError::MissingFeature { column: name.clone() })?;
            let threshold = node
                .threshold
                .ok_or_else(|| DataError::Model("split node without threshold".to_string()))?;
            let child_branch = branch.child(variable);
            let left = node_from_doc(
                left,
                feature_names,
                class_labels,
                task,
                child_branch.clone(),
                depth + 1,
            )?;
            let right =
                node_from_doc(right, feature_names, class_labels, task, child_branch, depth + 1)?;
            Ok(TreeNode {
                n: node.n,
                depth,
                branch,
                impurity,
                kind: NodeKind::Internal {
                    rule: SplitRule { variable, threshold },
                    left: Box::new(left),
                    right: Box::new(right),
                },
            })
        }
        (None, None, None) => {
            let fitted = match task {
                TaskKind::Regression => FittedValue::Regression(node.fitted.ok_or_else(
                    || DataError::Model("terminal node without fitted value".to_string()),
                )?),
                TaskKind::Classification => {
                    let label = node.fitted_class.as_ref().ok_or_else(|| {
                        DataError::Model("terminal node without fitted_class".to_string())
                    })?;
                    let class = class_labels
                        .iter()
                        .position(|l| l == label)
                        .ok_or_else(|| DataError::UnknownClass { label: label.clone() })?;
                    FittedValue::Class(class)
                }
            };
            Ok(TreeNode {
                n: node.n,
                depth,
                branch,
                impurity,
                kind: NodeKind::Terminal { fitted },
            })
        }
        _ => Err(DataError::Model(
            "node must be either a full split or a terminal".to_string(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use treepen_core::dataset::{Dataset, Target};
    use treepen_core::{grow, in_sample_loss, predict};

    fn small_tree() -> Tree {
        let ds = Dataset::from_parts(
            vec!["alpha".to_string(), "beta".to_string()],
            vec![
                1.0, 10.0, //
                2.0, 20.0, //
                3.0, 30.0, //
                4.0, 40.0,
            ],
            Target::Regression(vec![1.0, 1.0, 5.0, 5.0]),
            vec![],
        )
        .unwrap();
        let mut config = GrowConfig::unpenalized(GainKind::CartRegression);
        config.min_node_fraction = 0.25;
        grow(&ds, &ds.all_rows(), &config).unwrap()
    }

    #[test]
    fn roundtrip_preserves_predictions() {
        let tree = small_tree();
        let summary = TrainingSummary { n: 4, in_sample_loss: 0.0, r_squared: Some(1.0) };
        let text = serialize(&tree, &summary);
        let (restored, training) = deserialize(&text).unwrap();
        assert_eq!(training, summary);
        for x in [[0.0, 0.0], [2.4, 99.0], [3.0, -5.0], [100.0, 0.0]] {
            assert_eq!(predict(&tree, &x).unwrap(), predict(&restored, &x).unwrap());
        }
    }

    #[test]
    fn double_serialization_is_byte_identical() {
        let tree = small_tree();
        let summary = TrainingSummary { n: 4, in_sample_loss: 0.0, r_squared: Some(1.0) };
        let first = serialize(&tree, &summary);
        let (restored, training) = deserialize(&first).unwrap();
        let second = serialize(&restored, &training);
        assert_eq!(first, second);
    }

    #[test]
    fn document_shape_is_canonical() {
        let tree = small_tree();
        let summary = TrainingSummary { n: 4, in_sample_loss: 0.0, r_squared: Some(1.0) };
        let text = serialize(&tree, &summary);
        // keys sorted, compact
        assert!(text.starts_with("{\"class_labels\":[],\"config\":{"));
        assert!(!text.contains(": "));
        assert!(text.contains("\"format_version\":1"));
        // depth-1 tree: exactly 3 node records (1 split + 2 terminals)
        assert_eq!(text.matches("\"n\":").count(), 3 + 1); // 3 nodes + training summary
        assert_eq!(text.matches("\"fitted\":").count(), 2);
    }

    #[test]
    fn version_is_checked() {
        let tree = small_tree();
        let summary = TrainingSummary { n: 4, in_sample_loss: 0.0, r_squared: None };
        let text = serialize(&tree, &summary).replace("\"format_version\":1", "\"format_version\":9");
        assert!(matches!(deserialize(&text), Err(DataError::Model(_))));
    }

    #[test]
    fn classification_labels_roundtrip() {
        let ds = Dataset::from_parts(
            vec!["x".to_string()],
            vec![0.0, 1.0, 2.0, 3.0],
            Target::Classification { classes: vec![0, 0, 1, 1], n_classes: 2 },
            vec!["yes".to_string(), "no".to_string()],
        )
        .unwrap();
        let mut config = GrowConfig::unpenalized(GainKind::CartClassification(
            ClassImpurity::Gini,
        ));
        config.min_node_fraction = 0.25;
        let tree = grow(&ds, &ds.all_rows(), &config).unwrap();
        let loss = in_sample_loss(&ds, &tree, &ds.all_rows()).unwrap();
        let summary = TrainingSummary { n: 4, in_sample_loss: loss, r_squared: None };
        let text = serialize(&tree, &summary);
        assert!(text.contains("\"fitted_class\":\"yes\""));
        let (restored, _) = deserialize(&text).unwrap();
        for x in [[0.5], [2.5]] {
            assert_eq!(predict(&tree, &x).unwrap(), predict(&restored, &x).unwrap());
        }
    }
}
