//! Command-line driver: dataset evaluation, PR-curve export, and loss
//! spot-check verification.

mod loss_check;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kitti_eval::kitti::load_dataset;
use kitti_eval::metrics::{build_pr_curve, evaluate, EvalGrid, MetricKind};

/// Usage or I/O problems exit 2; evaluation failures and mismatches exit 1.
pub enum CliError {
    Usage(String),
    Eval(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Eval(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Eval(m) => m,
        }
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(name = "kitti-eval", version, about = "AP/AOS evaluation for KITTI-format 3D detections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate detections against ground truth and emit the metric tables
    Evaluate {
        /// Directory of ground-truth label files (<frame_id>.txt)
        #[arg(long)]
        gt: PathBuf,
        /// Directory of detection files (<frame_id>.txt, 16 fields per line)
        #[arg(long)]
        det: PathBuf,
        /// Comma-separated class names
        #[arg(long, value_delimiter = ',', default_value = "Car,Pedestrian,Cyclist")]
        classes: Vec<String>,
        /// Comma-separated metrics from {2d, bev, 3d, aos}
        #[arg(long, value_delimiter = ',', default_value = "2d,bev,3d,aos")]
        metrics: Vec<String>,
        /// Comma-separated difficulty levels from {0, 1, 2}
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        difficulties: Vec<u8>,
        /// Per-class IoU threshold override, e.g. --iou Car=0.7 (repeatable)
        #[arg(long = "iou")]
        iou: Vec<String>,
        /// Number of recall positions for AP interpolation
        #[arg(long = "ap-points", default_value_t = 11)]
        ap_points: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include a generation timestamp in the report metadata
        #[arg(long)]
        timestamp: bool,
        /// Print the fully resolved configuration and exit
        #[arg(long = "dump-config")]
        dump_config: bool,
    },
    /// Export the PR curve of one (class, difficulty, metric) cell as CSV
    PrExport {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        det: PathBuf,
        #[arg(long)]
        class: String,
        #[arg(long)]
        difficulty: u8,
        /// One of {2d, bev, 3d, aos}
        #[arg(long)]
        metric: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify loss-function values against a CSV of expected results
    LossCheck {
        /// CSV with rows kind,p_or_x,y,expected
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Evaluate {
            gt,
            det,
            classes,
            metrics,
            difficulties,
            iou,
            ap_points,
            format,
            out,
            timestamp,
            dump_config,
        } => cmd_evaluate(
            &gt, &det, classes, metrics, difficulties, iou, ap_points, format, out.as_deref(),
            timestamp, dump_config,
        ),
        Command::PrExport { gt, det, class, difficulty, metric, out } => {
            cmd_pr_export(&gt, &det, &class, difficulty, &metric, out.as_deref())
        }
        Command::LossCheck { input } => loss_check::cmd_loss_check(&input),
    }
}

fn parse_metrics(names: &[String]) -> Result<Vec<MetricKind>, CliError> {
    names
        .iter()
        .map(|name| {
            MetricKind::from_key(name)
                .ok_or_else(|| CliError::Usage(format!("unknown metric {name:?} (expected 2d, bev, 3d, or aos)")))
        })
        .collect()
}

fn parse_iou_overrides(pairs: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let (class, thr) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("bad --iou value {pair:?}, expected <class>=<threshold>")))?;
        let thr: f64 = thr
            .parse()
            .map_err(|_| CliError::Usage(format!("bad IoU threshold in {pair:?}")))?;
        if !(thr > 0.0 && thr <= 1.0) {
            return Err(CliError::Usage(format!("IoU threshold {thr} outside (0, 1]")));
        }
        map.insert(class.to_string(), thr);
    }
    Ok(map)
}

fn load_frames(gt: &Path, det: &Path) -> Result<Vec<kitti_eval::Frame>, CliError> {
    let outcome = load_dataset(gt, det).map_err(|e| CliError::Usage(e.to_string()))?;
    for skipped in &outcome.skipped_detection_files {
        eprintln!("warning: skipping detection file with no ground truth: {}", skipped.display());
    }
    Ok(outcome.frames)
}

fn write_output(out: Option<&Path>, content: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    gt: &Path,
    det: &Path,
    classes: Vec<String>,
    metrics: Vec<String>,
    difficulties: Vec<u8>,
    iou: Vec<String>,
    ap_points: u32,
    format: OutputFormat,
    out: Option<&Path>,
    timestamp: bool,
    dump_config: bool,
) -> CliResult {
    if classes.is_empty() || metrics.is_empty() || difficulties.is_empty() {
        return Err(CliError::Usage(
            "need at least one class, metric, and difficulty".into(),
        ));
    }
    if let Some(bad) = difficulties.iter().find(|&&d| d > 2) {
        return Err(CliError::Usage(format!("difficulty {bad} outside 0..=2")));
    }
    if ap_points != 11 && ap_points != 40 {
        return Err(CliError::Usage(format!("--ap-points must be 11 or 40, got {ap_points}")));
    }
    let grid = EvalGrid {
        classes,
        difficulties,
        metrics: parse_metrics(&metrics)?,
        iou_thresholds: parse_iou_overrides(&iou)?,
        ap_points,
        ..EvalGrid::default()
    };
    if dump_config {
        println!("{}", serde_json::to_string_pretty(&report::config_json(&grid)).unwrap());
        return Ok(());
    }
    let frames = load_frames(gt, det)?;
    let result = evaluate(&frames, &grid).map_err(|e| CliError::Eval(e.to_string()))?;
    let rendered = match format {
        OutputFormat::Text => report::render_text(&result, &grid, timestamp),
        OutputFormat::Json => report::render_json(&result, &grid, timestamp),
        OutputFormat::Csv => report::render_csv(&result),
    };
    write_output(out, &rendered)
}

fn cmd_pr_export(
    gt: &Path,
    det: &Path,
    class: &str,
    difficulty: u8,
    metric: &str,
    out: Option<&Path>,
) -> CliResult {
    if difficulty > 2 {
        return Err(CliError::Usage(format!("difficulty {difficulty} outside 0..=2")));
    }
    let kind = MetricKind::from_key(metric)
        .ok_or_else(|| CliError::Usage(format!("unknown metric {metric:?}")))?;
    let frames = load_frames(gt, det)?;
    let cfg = EvalGrid::default().config(class, difficulty, kind);
    let curve = build_pr_curve(&frames, &cfg);
    let mut csv = String::from("threshold,precision,recall,similarity\n");
    for p in &curve.points {
        csv.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6}\n",
            p.threshold, p.precision, p.recall, p.similarity
        ));
    }
    write_output(out, &csv)
}
