//! Property tests for the numeric invariants of the split machinery.
//!
//! Data generators draw from coarse dyadic grids so sums stay exact in f64
//! and tie-breaking paths get exercised instead of avoided.

use proptest::prelude::*;

use treepen_core::{
    bootstrap_sample, grow, impurity, in_sample_loss, penalized_objective, penalty, predict,
    raw_gain, scale_gain, BranchPath, ClassImpurity, Dataset, FittedValue, GainKind, GrowConfig,
    ImpurityKind, NodeStats, PenaltyConstant, PenaltyKind, RowSet, TaskKind,
};

fn class_counts() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..25, 2..6)
        .prop_filter("nonempty node", |c| c.iter().sum::<usize>() > 0)
}

fn grid_values(len: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0i32..64).prop_map(|i| i as f64 * 0.25), len)
}

fn cls_stats(counts: &[usize]) -> NodeStats {
    NodeStats::Classification { n: counts.iter().sum(), counts: counts.to_vec() }
}

fn reg_stats(ys: &[f64]) -> NodeStats {
    NodeStats::Regression {
        n: ys.len(),
        sum: ys.iter().sum(),
        sum_sq: ys.iter().map(|y| y * y).sum(),
        min: ys.iter().cloned().fold(f64::INFINITY, f64::min),
        max: ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }
}

fn regression_dataset(xs: Vec<Vec<f64>>, ys: Vec<f64>) -> Dataset {
    let p = xs[0].len();
    let names = (0..p).map(|i| format!("x{i}")).collect();
    let flat: Vec<f64> = xs.into_iter().flatten().collect();
    Dataset::from_parts(names, flat, treepen_core::dataset::Target::Regression(ys), vec![])
        .unwrap()
}

proptest! {
    #[test]
    fn gini_and_entropy_bounds(counts in class_counts()) {
        let stats = cls_stats(&counts);
        let k = counts.len() as f64;
        let gini = impurity(&stats, ImpurityKind::Gini).unwrap();
        let entropy = impurity(&stats, ImpurityKind::CrossEntropy).unwrap();
        prop_assert!(gini >= 0.0 && gini <= (k - 1.0) / k + 1e-12);
        prop_assert!(entropy >= 0.0 && entropy <= k.ln() + 1e-12);
        let pure = counts.iter().filter(|&&c| c > 0).count() == 1;
        prop_assert_eq!(gini == 0.0, pure);
        prop_assert_eq!(entropy == 0.0, pure);
    }

    #[test]
    fn uniform_distribution_maximizes_impurity(per_class in 1usize..20, k in 2usize..6) {
        let uniform = cls_stats(&vec![per_class; k]);
        let gini = impurity(&uniform, ImpurityKind::Gini).unwrap();
        let entropy = impurity(&uniform, ImpurityKind::CrossEntropy).unwrap();
        let kf = k as f64;
        prop_assert!((gini - (kf - 1.0) / kf).abs() < 1e-12);
        prop_assert!((entropy - kf.ln()).abs() < 1e-12);
    }

    #[test]
    fn variance_nonnegative_and_zero_iff_constant(ys in grid_values(1..40)) {
        let v = impurity(&reg_stats(&ys), ImpurityKind::Variance).unwrap();
        prop_assert!(v >= 0.0);
        let constant = ys.iter().all(|&y| y == ys[0]);
        prop_assert_eq!(v == 0.0, constant);
    }

    #[test]
    fn weighted_child_impurity_never_exceeds_parent(
        left_counts in class_counts(),
        right_counts in class_counts(),
    ) {
        let n_classes = left_counts.len().max(right_counts.len());
        let mut l = left_counts.clone();
        let mut r = right_counts.clone();
        l.resize(n_classes, 0);
        r.resize(n_classes, 0);
        let parent: Vec<usize> = l.iter().zip(&r).map(|(a, b)| a + b).collect();
        let (sp, sl, sr) = (cls_stats(&parent), cls_stats(&l), cls_stats(&r));
        for kind in [
            GainKind::CartClassification(ClassImpurity::Gini),
            GainKind::CartClassification(ClassImpurity::CrossEntropy),
        ] {
            let raw = raw_gain(&sp, &sl, &sr, kind).unwrap();
            prop_assert!(raw >= -1e-12, "concavity violated: {raw}");
        }
    }

    #[test]
    fn regression_concavity(left in grid_values(1..20), right in grid_values(1..20)) {
        let parent: Vec<f64> = left.iter().chain(&right).copied().collect();
        let raw = raw_gain(
            &reg_stats(&parent),
            &reg_stats(&left),
            &reg_stats(&right),
            GainKind::CartRegression,
        )
        .unwrap();
        prop_assert!(raw >= -1e-12);
    }

    #[test]
    fn scaled_gain_in_unit_interval(
        left in grid_values(1..20),
        right in grid_values(1..20),
        one_sided in any::<bool>(),
    ) {
        let parent: Vec<f64> = left.iter().chain(&right).copied().collect();
        let (sp, sl, sr) = (reg_stats(&parent), reg_stats(&left), reg_stats(&right));
        let kinds = if one_sided {
            [GainKind::OneSidedPurityRegression, GainKind::HighMeans]
        } else {
            [GainKind::CartRegression, GainKind::LowMeans]
        };
        for kind in kinds {
            let raw = raw_gain(&sp, &sl, &sr, kind).unwrap();
            // Err means a pure parent: no feasible split to scale
            if let Ok(scaled) = scale_gain(&sp, raw, kind) {
                prop_assert!((0.0..=1.0).contains(&scaled), "scaled {scaled}");
            }
        }
    }

    #[test]
    fn bootstrap_is_a_partition(n in 1usize..200, seed in any::<u64>()) {
        let ys: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let ds = regression_dataset(ys.iter().map(|&y| vec![y]).collect(), ys);
        let (in_bag, oob) = bootstrap_sample(&ds, seed);
        prop_assert_eq!(in_bag.len(), n);
        let mut seen = vec![false; n];
        for i in in_bag.iter() {
            seen[i] = true;
        }
        for i in oob.iter() {
            prop_assert!(!seen[i]);
            seen[i] = true;
        }
        prop_assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn penalty_in_unit_interval(
        branch in prop::collection::vec(0usize..5, 0..8),
        variable in 0usize..5,
        k in 0.0f64..=1.0,
    ) {
        let k = PenaltyConstant::new(k).unwrap();
        let path = BranchPath::from_variables(branch.clone());
        for kind in [PenaltyKind::None, PenaltyKind::NewVariable, PenaltyKind::Ema] {
            let gamma = penalty(kind, k, &path, variable);
            prop_assert!((0.0..=1.0).contains(&gamma));
        }
        // geometric bound and the all-match case
        let gamma = penalty(PenaltyKind::Ema, k, &path, variable);
        let bound = 1.0 - (1.0 - k.value()).powi(branch.len() as i32);
        prop_assert!(gamma <= bound + 1e-12);
        if branch.iter().all(|&v| v == variable) {
            prop_assert_eq!(gamma, 0.0);
        }
        let objective = penalized_objective(0.5, gamma);
        prop_assert!((0.5 - gamma - objective).abs() < 1e-15);
    }

    #[test]
    fn ema_weights_decay_toward_root(d in 1usize..8, k in 0.01f64..0.99) {
        // branch that matches the candidate everywhere except one level:
        // the penalty is exactly that level's weight
        let kc = PenaltyConstant::new(k).unwrap();
        let mut previous = f64::INFINITY;
        for j in (0..d).rev() {
            let mut vars = vec![7usize; d];
            vars[j] = 3;
            let gamma = penalty(PenaltyKind::Ema, kc, &BranchPath::from_variables(vars), 7);
            prop_assert!(gamma < previous, "weight at depth {j} did not decay");
            previous = gamma;
        }
        // the parent level carries exactly k
        let mut vars = vec![7usize; d];
        vars[d - 1] = 3;
        let gamma = penalty(PenaltyKind::Ema, kc, &BranchPath::from_variables(vars), 7);
        prop_assert!((gamma - k).abs() < 1e-15);
    }

    #[test]
    fn grown_tree_respects_contracts(
        rows in prop::collection::vec((grid_values(2..3), (0i32..32)), 4..40),
        penalty_kind in prop::sample::select(vec![
            PenaltyKind::None,
            PenaltyKind::NewVariable,
            PenaltyKind::Ema,
        ]),
        k in 0.0f64..=1.0,
    ) {
        let xs: Vec<Vec<f64>> = rows.iter().map(|(x, _)| x.clone()).collect();
        let ys: Vec<f64> = rows.iter().map(|(_, y)| *y as f64 * 0.25).collect();
        let n = ys.len();
        let ds = regression_dataset(xs, ys.clone());
        let config = GrowConfig::new(
            GainKind::CartRegression,
            penalty_kind,
            PenaltyConstant::new(k).unwrap(),
            0.1,
        )
        .unwrap();
        let tree = grow(&ds, &ds.all_rows(), &config).unwrap();

        // terminal minimum size
        let min_child = (0.1f64 * n as f64).ceil() as usize;
        for leaf in tree.root.terminals() {
            prop_assert!(leaf.n >= min_child);
        }

        // every training row routes to a terminal whose fitted value is the
        // mean of the rows routed there (recomputed independently)
        let mut leaf_rows: std::collections::HashMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let mut node = &tree.root;
            loop {
                match &node.kind {
                    treepen_core::NodeKind::Terminal { .. } => break,
                    treepen_core::NodeKind::Internal { rule, left, right } => {
                        node = if ds.feature(i, rule.variable) <= rule.threshold {
                            left
                        } else {
                            right
                        };
                    }
                }
            }
            leaf_rows.entry(node as *const _ as usize).or_default().push(i);
        }
        let mut covered = 0;
        for leaf in tree.root.terminals() {
            let members = &leaf_rows[&(leaf as *const _ as usize)];
            prop_assert_eq!(members.len(), leaf.n);
            covered += members.len();
            let mean: f64 = members.iter().map(|&i| ds.y(i)).sum::<f64>() / leaf.n as f64;
            match leaf.kind {
                treepen_core::NodeKind::Terminal { fitted: FittedValue::Regression(v) } => {
                    prop_assert!((v - mean).abs() < 1e-9);
                    // prediction through the public API agrees
                    for &i in members {
                        prop_assert_eq!(predict(&tree, ds.row(i)).unwrap(), FittedValue::Regression(v));
                    }
                }
                _ => prop_assert!(false, "leaf is not a regression terminal"),
            }
        }
        prop_assert_eq!(covered, n);

        // splitting never hurts in-sample loss vs the root-only tree
        let loss = in_sample_loss(&ds, &tree, &ds.all_rows()).unwrap();
        let var = {
            let m: f64 = ds.all_rows().iter().map(|i| ds.y(i)).sum::<f64>() / n as f64;
            ds.all_rows().iter().map(|i| (ds.y(i) - m).powi(2)).sum::<f64>() / n as f64
        };
        prop_assert!(loss <= var + 1e-9);

        // k = 0 reproduces the unpenalized tree exactly
        if k == 0.0 {
            let base = grow(&ds, &ds.all_rows(), &GrowConfig {
                penalty: PenaltyKind::None,
                ..config.clone()
            })
            .unwrap();
            prop_assert_eq!(&tree.root, &base.root);
        }
    }

    #[test]
    fn classification_task_checked(counts in class_counts()) {
        let stats = cls_stats(&counts);
        prop_assert_eq!(stats.task(), TaskKind::Classification);
        prop_assert!(impurity(&stats, ImpurityKind::Variance).is_err());
    }
}

#[test]
fn rowset_multiplicity_in_losses() {
    // duplicated rows weigh twice in node statistics and losses
    let ds = regression_dataset(vec![vec![0.0], vec![1.0]], vec![0.0, 2.0]);
    let rows = RowSet::new(vec![0, 1, 1]);
    let stats = treepen_core::node_stats(&ds, &rows).unwrap();
    assert_eq!(stats.n(), 3);
    assert_eq!(stats.mean(), 4.0 / 3.0);
}
