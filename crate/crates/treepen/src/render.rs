//! Tree rendering: Graphviz DOT digraphs and indented plain text.

use treepen_core::{FittedValue, NodeKind, Tree, TreeNode};

/// Rounds to `sig` significant digits and prints without trailing zeros.
pub fn format_sig(v: f64, sig: u32) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = sig as i32 - 1 - exp;
    let scale = 10f64.powi(decimals);
    let rounded = (v * scale).round() / scale;
    let mut s = format!("{:.*}", decimals.max(0) as usize, rounded);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn fitted_label(fitted: &FittedValue, tree: &Tree) -> String {
    match fitted {
        FittedValue::Regression(v) => format_sig(*v, 4),
        FittedValue::Class(c) => tree.class_labels[*c].clone(),
    }
}

/// Renders the tree as a DOT digraph: internal nodes labeled
/// `var ≤ threshold`, terminals labeled with the fitted value and size,
/// the yes branch on the left edge.
pub fn render_dot(tree: &Tree) -> String {
    let mut out = String::from("digraph tree {\n  node [shape=box];\n");
    let mut counter = 0usize;
    render_dot_node(&tree.root, tree, &mut counter, &mut out);
    out.push_str("}\n");
    out
}

fn render_dot_node(node: &TreeNode, tree: &Tree, counter: &mut usize, out: &mut String) -> usize {
    let id = *counter;
    *counter += 1;
    match &node.kind {
        NodeKind::Internal { rule, left, right } => {
            out.push_str(&format!(
                "  n{id} [label=\"{} \u{2264} {}\\nn={}\"];\n",
                escape(&tree.feature_names[rule.variable]),
                format_sig(rule.threshold, 4),
                node.n
            ));
            let left_id = render_dot_node(left, tree, counter, out);
            let right_id = render_dot_node(right, tree, counter, out);
            out.push_str(&format!("  n{id} -> n{left_id} [label=\"yes\"];\n"));
            out.push_str(&format!("  n{id} -> n{right_id} [label=\"no\"];\n"));
        }
        NodeKind::Terminal { fitted } => {
            out.push_str(&format!(
                "  n{id} [label=\"{}\\nn={}\"];\n",
                escape(&fitted_label(fitted, tree)),
                node.n
            ));
        }
    }
    id
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the tree as indented text, one node per line.
pub fn render_text(tree: &Tree) -> String {
    let mut out = String::new();
    render_text_node(&tree.root, tree, 0, None, &mut out);
    out
}

fn render_text_node(
    node: &TreeNode,
    tree: &Tree,
    indent: usize,
    edge: Option<&str>,
    out: &mut String,
) {
    out.push_str(&"  ".repeat(indent));
    if let Some(edge) = edge {
        out.push_str(edge);
        out.push_str(": ");
    }
    match &node.kind {
        NodeKind::Internal { rule, left, right } => {
            out.push_str(&format!(
                "{} \u{2264} {} (n={})\n",
                tree.feature_names[rule.variable],
                format_sig(rule.threshold, 4),
                node.n
            ));
            render_text_node(left, tree, indent + 1, Some("yes"), out);
            render_text_node(right, tree, indent + 1, Some("no"), out);
        }
        NodeKind::Terminal { fitted } => {
            out.push_str(&format!("{} (n={})\n", fitted_label(fitted, tree), node.n));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use treepen_core::dataset::{Dataset, Target};
    use treepen_core::{grow, GainKind, GrowConfig};

    fn leaf_only_tree() -> Tree {
        let ds = Dataset::from_parts(
            vec!["x".to_string()],
            vec![1.0],
            Target::Regression(vec![4.2]),
            vec![],
        )
        .unwrap();
        grow(&ds, &ds.all_rows(), &GrowConfig::unpenalized(GainKind::CartRegression)).unwrap()
    }

    fn depth_one_tree() -> Tree {
        let ds = Dataset::from_parts(
            vec!["x".to_string()],
            vec![1.0, 2.0, 3.0, 4.0],
            Target::Regression(vec![1.0, 1.0, 5.0, 5.0]),
            vec![],
        )
        .unwrap();
        let mut config = GrowConfig::unpenalized(GainKind::CartRegression);
        config.min_node_fraction = 0.25;
        grow(&ds, &ds.all_rows(), &config).unwrap()
    }

    fn count_dot_nodes_and_edges(dot: &str) -> (usize, usize) {
        let nodes = dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count();
        let edges = dot.lines().filter(|l| l.contains("->")).count();
        (nodes, edges)
    }

    #[test]
    fn leaf_only_dot() {
        let dot = render_dot(&leaf_only_tree());
        let (nodes, edges) = count_dot_nodes_and_edges(&dot);
        assert_eq!(nodes, 1);
        assert_eq!(edges, 0);
        assert!(dot.starts_with("digraph tree {"));
        assert!(dot.trim_end().ends_with('}'));
        assert!(dot.contains("4.2"));
    }

    #[test]
    fn depth_one_dot() {
        let tree = depth_one_tree();
        let dot = render_dot(&tree);
        let (nodes, edges) = count_dot_nodes_and_edges(&dot);
        assert_eq!(nodes, 3);
        assert_eq!(edges, 2);
        assert!(dot.contains("x \u{2264} 2.5"));
        assert!(dot.contains("[label=\"yes\"]"));
        assert!(dot.contains("[label=\"no\"]"));
    }

    #[test]
    fn edge_count_is_node_count_minus_one() {
        for tree in [leaf_only_tree(), depth_one_tree()] {
            let (nodes, edges) = count_dot_nodes_and_edges(&render_dot(&tree));
            assert_eq!(edges, nodes - 1);
            assert_eq!(nodes, tree.root.count_nodes());
        }
    }

    #[test]
    fn text_render_shows_structure() {
        let text = render_text(&depth_one_tree());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("x \u{2264} 2.5"));
        assert!(lines[1].trim_start().starts_with("yes: 1"));
        assert!(lines[2].trim_start().starts_with("no: 5"));
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(6.941, 4), "6.941");
        assert_eq!(format_sig(14.4, 4), "14.4");
        assert_eq!(format_sig(0.00632, 4), "0.00632");
        assert_eq!(format_sig(396.9, 4), "396.9");
        assert_eq!(format_sig(12345.0, 4), "12350");
        assert_eq!(format_sig(-2.74653, 4), "-2.747");
        assert_eq!(format_sig(0.0, 4), "0");
    }
}
