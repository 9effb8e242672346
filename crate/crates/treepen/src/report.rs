//! Report output for out-of-bag runs: CSV and aligned plain-text tables.

use treepen_core::{CompareRow, GainKind, OobReport, PenaltyKind};

pub fn penalty_name(penalty: PenaltyKind) -> &'static str {
    match penalty {
        PenaltyKind::None => "none",
        PenaltyKind::NewVariable => "new-variable",
        PenaltyKind::Ema => "ema",
    }
}

pub fn criterion_name(gain: GainKind) -> &'static str {
    match gain {
        GainKind::CartRegression | GainKind::CartClassification(_) => "cart",
        GainKind::OneSidedPurityRegression | GainKind::OneSidedPurityClassification => {
            "os-purity"
        }
        GainKind::HighMeans => "high-means",
        GainKind::LowMeans => "low-means",
        GainKind::OneSidedExtremeClassification(_) => "os-extreme",
    }
}

const COLUMNS: [&str; 7] = [
    "dataset",
    "criterion",
    "penalty",
    "oob_loss",
    "loss_increase_pct",
    "avg_k_star",
    "mean_holdout_frac",
];

fn row_values(dataset: &str, criterion: &str, row: &CompareRow) -> [String; 7] {
    [
        dataset.to_string(),
        criterion.to_string(),
        penalty_name(row.penalty).to_string(),
        format!("{}", row.report.oob_loss),
        format!("{}", row.loss_increase_pct),
        row.report.mean_k_star.map(|k| format!("{k}")).unwrap_or_default(),
        format!("{}", row.report.mean_holdout_frac),
    ]
}

/// The comparison report as CSV with the fixed seven-column layout.
pub fn compare_csv(dataset: &str, gain: GainKind, rows: &[CompareRow]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row_values(dataset, criterion_name(gain), row).join(","));
        out.push('\n');
    }
    out
}

/// The comparison report as an aligned plain-text table.
pub fn compare_text(dataset: &str, gain: GainKind, rows: &[CompareRow]) -> String {
    let mut cells: Vec<[String; 7]> = vec![COLUMNS.map(|c| c.to_string())];
    for row in rows {
        let mut values = row_values(dataset, criterion_name(gain), row);
        // trim float noise for human eyes
        values[3] = format!("{:.4}", row.report.oob_loss);
        values[4] = format!("{:+.1}", row.loss_increase_pct);
        values[5] = row.report.mean_k_star.map(|k| format!("{k:.2}")).unwrap_or_default();
        values[6] = format!("{:.3}", row.report.mean_holdout_frac);
        cells.push(values);
    }
    let widths: Vec<usize> = (0..7)
        .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> =
            row.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Per-replicate out-of-bag results as CSV.
pub fn oob_csv(report: &OobReport) -> String {
    let mut out = String::from("replicate,holdout_size,loss,k_star\n");
    for r in &report.replicates {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.index,
            r.holdout_size,
            r.loss,
            r.k_star.map(|k| k.to_string()).unwrap_or_default()
        ));
    }
    out
}

/// Tuning trace (k, in-sample loss) as CSV.
pub fn trace_csv(trace: &[(f64, f64)]) -> String {
    let mut out = String::from("k,in_sample_loss\n");
    for (k, loss) in trace {
        out.push_str(&format!("{k},{loss}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use treepen_core::{OobReport, ReplicateOutcome};

    fn fake_report(loss: f64, k: Option<f64>) -> OobReport {
        OobReport {
            replicates: vec![ReplicateOutcome { index: 0, holdout_size: 10, loss, k_star: k }],
            dropped: vec![],
            oob_loss: loss,
            mean_k_star: k,
            oob_r_squared: None,
            mean_holdout_frac: 0.37,
        }
    }

    #[test]
    fn csv_has_exact_columns() {
        let rows = vec![
            CompareRow {
                penalty: PenaltyKind::None,
                report: fake_report(10.0, None),
                loss_increase_pct: 0.0,
            },
            CompareRow {
                penalty: PenaltyKind::Ema,
                report: fake_report(10.8, Some(0.2)),
                loss_increase_pct: 8.0,
            },
        ];
        let csv = compare_csv("boston", GainKind::CartRegression, &rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "dataset,criterion,penalty,oob_loss,loss_increase_pct,avg_k_star,mean_holdout_frac"
        );
        assert_eq!(lines.next().unwrap(), "boston,cart,none,10,0,,0.37");
        assert_eq!(lines.next().unwrap(), "boston,cart,ema,10.8,8,0.2,0.37");

        let text = compare_text("boston", GainKind::CartRegression, &rows);
        assert!(text.lines().next().unwrap().starts_with("dataset"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn oob_csv_lists_replicates() {
        let csv = oob_csv(&fake_report(1.5, Some(0.1)));
        assert_eq!(csv, "replicate,holdout_size,loss,k_star\n0,10,1.5,0.1\n");
    }

    #[test]
    fn trace_csv_layout() {
        let csv = trace_csv(&[(0.0, 10.0), (0.5, 12.5)]);
        assert_eq!(csv, "k,in_sample_loss\n0,10\n0.5,12.5\n");
    }
}
