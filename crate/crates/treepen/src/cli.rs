//! Command-line interface: fit, tune, oob, compare, render, predict.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Output files are
//! written atomically (temp file in the target directory, then rename), and
//! identical inputs with identical seeds produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use treepen_core::{
    compare_penalties, grow, in_sample_loss, oob_estimate, r_squared, tune, Dataset, FitProcedure,
    GainKind, GrowConfig, GrowError, OobConfig, PenaltyConstant, PenaltyKind, TaskKind,
    TuneConfig,
};

use crate::csv::{load_csv, load_matrix, TaskChoice};
use crate::error::DataError;
use crate::model::{self, gain_from_parts, TrainingSummary};
use crate::render::{render_dot, render_text};
use crate::report;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(DataError),
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e)
    }
}

impl From<GrowError> for CliError {
    fn from(e: GrowError) -> Self {
        // misconfigured criterion/task combinations are usage errors
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "treepen", version, about = "Penalized decision trees on tabular data")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow a tree with a fixed penalty constant and write the model file.
    Fit(FitArgs),
    /// Select the penalty constant by the loss-constraint rule and write
    /// the tuned model.
    Tune(TuneArgs),
    /// Estimate out-of-bag risk over bootstrap replicates.
    Oob(OobArgs),
    /// Compare penalty families under paired bootstrap replicates.
    Compare(CompareArgs),
    /// Render a model file as DOT or indented text.
    Render(RenderArgs),
    /// Predict a CSV of feature rows with a model file.
    Predict(PredictArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    Auto,
    Regression,
    Classification,
}

impl From<TaskArg> for TaskChoice {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Auto => TaskChoice::Auto,
            TaskArg::Regression => TaskChoice::Regression,
            TaskArg::Classification => TaskChoice::Classification,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Cart,
    OsPurity,
    HighMeans,
    LowMeans,
    OsExtreme,
}

impl CriterionArg {
    fn as_str(self) -> &'static str {
        match self {
            CriterionArg::Cart => "cart",
            CriterionArg::OsPurity => "os-purity",
            CriterionArg::HighMeans => "high-means",
            CriterionArg::LowMeans => "low-means",
            CriterionArg::OsExtreme => "os-extreme",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ImpurityArg {
    Gini,
    Entropy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PenaltyArg {
    None,
    NewVariable,
    Ema,
}

impl From<PenaltyArg> for PenaltyKind {
    fn from(p: PenaltyArg) -> Self {
        match p {
            PenaltyArg::None => PenaltyKind::None,
            PenaltyArg::NewVariable => PenaltyKind::NewVariable,
            PenaltyArg::Ema => PenaltyKind::Ema,
        }
    }
}

#[derive(Args, Debug)]
struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Name of the target column.
    #[arg(long)]
    target: String,
    /// Target interpretation; auto = classification iff non-numeric.
    #[arg(long, value_enum, default_value_t = TaskArg::Auto)]
    task: TaskArg,
}

#[derive(Args, Debug)]
struct CriterionArgs {
    #[arg(long, value_enum, default_value_t = CriterionArg::Cart)]
    criterion: CriterionArg,
    /// Classification CART impurity.
    #[arg(long, value_enum)]
    impurity: Option<ImpurityArg>,
    /// Class label targeted by os-extreme.
    #[arg(long)]
    class_of_interest: Option<String>,
    #[arg(long, value_enum, default_value_t = PenaltyArg::None)]
    penalty: PenaltyArg,
    /// Minimum fraction of learning rows in each child.
    #[arg(long, default_value_t = treepen_core::grower::DEFAULT_MIN_NODE_FRACTION)]
    min_node_frac: f64,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    criterion: CriterionArgs,
    /// Penalty constant in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    k: f64,
    /// Model output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TuneArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    criterion: CriterionArgs,
    /// Allowed fractional loss increase over the unpenalized tree.
    #[arg(long, default_value_t = 0.10)]
    c: f64,
    /// Constant grid as start:step:end.
    #[arg(long, default_value = "0.01:0.01:0.99")]
    k_grid: String,
    /// Tuned model output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV of per-k in-sample losses.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OobArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    criterion: CriterionArgs,
    /// Number of bootstrap replicates.
    #[arg(long, default_value_t = 100)]
    bootstrap: usize,
    #[arg(long, env = "TREEPEN_SEED", default_value_t = 0)]
    seed: u64,
    /// Fix the penalty constant instead of tuning it per replicate.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = 0.10)]
    c: f64,
    #[arg(long, default_value = "0.01:0.01:0.99")]
    k_grid: String,
    /// Per-replicate report CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    criterion: CriterionArgs,
    /// Penalty families to compare against the unpenalized baseline.
    #[arg(long, value_enum, value_delimiter = ',',
          default_values_t = [PenaltyArg::None, PenaltyArg::NewVariable, PenaltyArg::Ema])]
    penalties: Vec<PenaltyArg>,
    #[arg(long, default_value_t = 100)]
    bootstrap: usize,
    #[arg(long, env = "TREEPEN_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.10)]
    c: f64,
    #[arg(long, default_value = "0.01:0.01:0.99")]
    k_grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or text.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// Model JSON path.
    #[arg(long)]
    model: PathBuf,
    /// dot or text.
    #[arg(long, default_value = "dot")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// CSV with the model's feature columns.
    #[arg(long)]
    data: PathBuf,
    /// Predictions CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Writes via a temp file in the target directory, then renames into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp.partial");
    fs::write(&tmp, contents).map_err(|e| {
        CliError::Data(DataError::Io { path: tmp.display().to_string(), message: e.to_string() })
    })?;
    fs::rename(&tmp, path).map_err(|e| {
        CliError::Data(DataError::Io { path: path.display().to_string(), message: e.to_string() })
    })?;
    Ok(())
}

fn emit(out: Option<&PathBuf>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "--k-grid expects start:step:end, got '{spec}'"
        )));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
    let nums =
        nums.map_err(|_| CliError::Usage(format!("--k-grid has non-numeric parts: '{spec}'")))?;
    let grid = treepen_core::tuning::grid_from_spec(nums[0], nums[1], nums[2]);
    if grid.is_empty() || grid.iter().any(|k| !(0.0..=1.0).contains(k)) {
        return Err(CliError::Usage(format!("--k-grid '{spec}' leaves [0, 1]")));
    }
    Ok(grid)
}

fn resolve_gain(
    dataset: &Dataset,
    criterion: &CriterionArgs,
) -> Result<GainKind, CliError> {
    let class_of_interest = match (&criterion.class_of_interest, criterion.criterion) {
        (Some(label), CriterionArg::OsExtreme) => Some(
            dataset
                .class_labels()
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| DataError::UnknownClass { label: label.clone() })?,
        ),
        (None, CriterionArg::OsExtreme) => {
            return Err(CliError::Usage(
                "--criterion os-extreme requires --class-of-interest".to_string(),
            ))
        }
        _ => None,
    };
    let impurity = criterion.impurity.map(|i| match i {
        ImpurityArg::Gini => "gini",
        ImpurityArg::Entropy => "entropy",
    });
    gain_from_parts(
        criterion.criterion.as_str(),
        impurity,
        class_of_interest,
        dataset.task(),
    )
    .map_err(|e| CliError::Usage(e.to_string()))
}

fn grow_config(
    dataset: &Dataset,
    criterion: &CriterionArgs,
    k: f64,
) -> Result<GrowConfig, CliError> {
    let gain = resolve_gain(dataset, criterion)?;
    let k = PenaltyConstant::new(k)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    GrowConfig::new(gain, criterion.penalty.into(), k, criterion.min_node_frac)
        .map_err(CliError::from)
}

fn training_summary(dataset: &Dataset, tree: &treepen_core::Tree) -> TrainingSummary {
    let rows = dataset.all_rows();
    let loss = in_sample_loss(dataset, tree, &rows).expect("tree fits its own dataset");
    let r2 = match dataset.task() {
        TaskKind::Regression => Some(r_squared(dataset, tree, &rows).expect("regression")),
        TaskKind::Classification => None,
    };
    TrainingSummary { n: dataset.n_rows(), in_sample_loss: loss, r_squared: r2 }
}

fn print_summary(tree: &treepen_core::Tree, summary: &TrainingSummary, k_star: Option<f64>) {
    if let Some(k) = k_star {
        println!("k* = {k}");
    }
    match summary.r_squared {
        Some(r2) => println!("in-sample R\u{00b2} = {r2:.4} (MSE {:.4})", summary.in_sample_loss),
        None => println!("in-sample MR = {:.4}", summary.in_sample_loss),
    }
    let metrics = treepen_core::interpretability_metrics(tree);
    println!(
        "predictors used: {} of {} (max per branch: {}, branch switches up to {})",
        metrics.total_distinct,
        tree.feature_names.len(),
        metrics.max_distinct,
        metrics.per_terminal_switches.iter().max().copied().unwrap_or(0)
    );
}

fn cmd_fit(args: &FitArgs) -> Result<(), CliError> {
    let dataset = load_csv(&args.data.data, &args.data.target, args.data.task.into())?;
    let config = grow_config(&dataset, &args.criterion, args.k)?;
    let tree = grow(&dataset, &dataset.all_rows(), &config)?;
    let summary = training_summary(&dataset, &tree);
    write_atomic(&args.out, &model::serialize(&tree, &summary))?;
    print_summary(&tree, &summary, None);
    Ok(())
}

fn cmd_tune(args: &TuneArgs) -> Result<(), CliError> {
    if args.criterion.penalty == PenaltyArg::None {
        return Err(CliError::Usage(
            "tune requires --penalty new-variable or --penalty ema".to_string(),
        ));
    }
    let dataset = load_csv(&args.data.data, &args.data.target, args.data.task.into())?;
    let base = grow_config(&dataset, &args.criterion, 0.0)?;
    let tune_config = TuneConfig::new(parse_grid(&args.k_grid)?, args.c, base)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let result = tune(&dataset, &dataset.all_rows(), &tune_config)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let summary = training_summary(&dataset, &result.tree);
    write_atomic(&args.out, &model::serialize(&result.tree, &summary))?;
    if let Some(trace_out) = &args.trace_out {
        write_atomic(trace_out, &report::trace_csv(&result.trace))?;
    }
    print_summary(&result.tree, &summary, Some(result.k_star));
    println!(
        "unpenalized loss {} -> tuned loss {} (threshold {})",
        result.unpenalized_loss,
        result.tuned_loss,
        (1.0 + args.c) * result.unpenalized_loss
    );
    Ok(())
}

fn cmd_oob(args: &OobArgs) -> Result<(), CliError> {
    let dataset = load_csv(&args.data.data, &args.data.target, args.data.task.into())?;
    let base = grow_config(&dataset, &args.criterion, args.k.unwrap_or(0.0))?;
    let procedure = match (args.k, args.criterion.penalty) {
        (Some(_), _) | (None, PenaltyArg::None) => FitProcedure::Fixed(base),
        (None, _) => FitProcedure::Tuned(
            TuneConfig::new(parse_grid(&args.k_grid)?, args.c, base)
                .map_err(|e| CliError::Usage(e.to_string()))?,
        ),
    };
    let config = OobConfig { replicates: args.bootstrap, base_seed: args.seed, procedure };
    let report_data = oob_estimate(&dataset, &config)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(out) = &args.out {
        write_atomic(out, &report::oob_csv(&report_data))?;
    }
    println!("replicates retained: {}", report_data.replicates.len());
    if !report_data.dropped.is_empty() {
        println!("replicates dropped (empty holdout): {:?}", report_data.dropped);
    }
    println!("OOB loss = {:.6}", report_data.oob_loss);
    if let Some(r2) = report_data.oob_r_squared {
        println!("OOB R\u{00b2} = {r2:.4}");
    }
    if let Some(k) = report_data.mean_k_star {
        println!("average k* = {k:.4}");
    }
    println!("mean holdout fraction = {:.4}", report_data.mean_holdout_frac);
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let dataset = load_csv(&args.data.data, &args.data.target, args.data.task.into())?;
    let base = grow_config(&dataset, &args.criterion, 0.0)?;
    let gain = base.gain;
    let tune_config = TuneConfig::new(parse_grid(&args.k_grid)?, args.c, base)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let config = OobConfig {
        replicates: args.bootstrap,
        base_seed: args.seed,
        procedure: FitProcedure::Tuned(tune_config),
    };
    let penalties: Vec<PenaltyKind> =
        args.penalties.iter().map(|&p| PenaltyKind::from(p)).collect();
    let rows = compare_penalties(&dataset, &config, &penalties)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let dataset_name = args
        .data
        .data
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    let rendered = match args.format.as_str() {
        "csv" => report::compare_csv(&dataset_name, gain, &rows),
        "text" => report::compare_text(&dataset_name, gain, &rows),
        other => return Err(CliError::Usage(format!("unknown --format '{other}'"))),
    };
    emit(args.out.as_ref(), &rendered)
}

fn cmd_render(args: &RenderArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.model).map_err(|e| {
        DataError::Io { path: args.model.display().to_string(), message: e.to_string() }
    })?;
    let (tree, _) = model::deserialize(&text)?;
    let rendered = match args.format.as_str() {
        "dot" => render_dot(&tree),
        "text" => render_text(&tree),
        other => return Err(CliError::Usage(format!("unknown --format '{other}'"))),
    };
    emit(args.out.as_ref(), &rendered)
}

fn cmd_predict(args: &PredictArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.model).map_err(|e| {
        DataError::Io { path: args.model.display().to_string(), message: e.to_string() }
    })?;
    let (tree, _) = model::deserialize(&text)?;
    let rows = load_matrix(&args.data, &tree.feature_names)?;
    let mut out = String::from("prediction\n");
    for row in &rows {
        let fitted = treepen_core::predict(&tree, row)
            .map_err(|e| DataError::Model(e.to_string()))?;
        match fitted {
            treepen_core::FittedValue::Regression(v) => out.push_str(&format!("{v}\n")),
            treepen_core::FittedValue::Class(c) => {
                out.push_str(&tree.class_labels[c]);
                out.push('\n');
            }
        }
    }
    emit(args.out.as_ref(), &out)
}

/// Parses argv and runs a subcommand; the exit code contract lives in main.
pub fn run<I, T>(argv: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    match &cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Tune(args) => cmd_tune(args),
        Command::Oob(args) => cmd_oob(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Render(args) => cmd_render(args),
        Command::Predict(args) => cmd_predict(args),
    }
}
