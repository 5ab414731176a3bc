//! PR curves, interpolated AP, orientation similarity and AOS, and the
//! per-class, per-difficulty report grid.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::eval::{
    collect_match_scores, count_at_threshold, partition_frame, score_thresholds, EvalConfig,
    IouKind,
};
use crate::kitti::Frame;

/// One point of the PR curve at a score threshold. `similarity` is the
/// orientation similarity s at this threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub similarity: f64,
}

/// PR points ordered by descending threshold (recall non-decreasing).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricKind {
    Ap2d,
    ApBev,
    Ap3d,
    Aos,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] =
        [MetricKind::Ap2d, MetricKind::ApBev, MetricKind::Ap3d, MetricKind::Aos];

    /// Short key used in CLI flags and JSON output.
    pub fn key(self) -> &'static str {
        match self {
            MetricKind::Ap2d => "2d",
            MetricKind::ApBev => "bev",
            MetricKind::Ap3d => "3d",
            MetricKind::Aos => "aos",
        }
    }

    /// Table title for text reports.
    pub fn title(self) -> &'static str {
        match self {
            MetricKind::Ap2d => "AP BBOX_2D",
            MetricKind::ApBev => "AP BBOX_BEV",
            MetricKind::Ap3d => "AP BBOX_3D",
            MetricKind::Aos => "AOS",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        match key {
            "2d" => Some(MetricKind::Ap2d),
            "bev" => Some(MetricKind::ApBev),
            "3d" => Some(MetricKind::Ap3d),
            "aos" => Some(MetricKind::Aos),
            _ => None,
        }
    }

    /// The IoU kind used for matching. Orientation similarity is judged on
    /// image-plane matches, so AOS uses 2D IoU.
    pub fn iou_kind(self) -> IouKind {
        match self {
            MetricKind::Ap2d | MetricKind::Aos => IouKind::TwoD,
            MetricKind::ApBev => IouKind::Bev,
            MetricKind::Ap3d => IouKind::ThreeD,
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("class {0:?} appears in neither ground truth nor detections")]
    UnknownClass(String),
    #[error(transparent)]
    Config(#[from] crate::eval::ConfigError),
}

/// Requested evaluation grid: classes x difficulty levels x metric kinds.
#[derive(Debug, Clone)]
pub struct EvalGrid {
    pub classes: Vec<String>,
    pub difficulties: Vec<u8>,
    pub metrics: Vec<MetricKind>,
    /// Per-class IoU threshold overrides; unlisted classes use the defaults
    /// (0.7 for Car, 0.5 otherwise).
    pub iou_thresholds: BTreeMap<String, f64>,
    pub ap_points: u32,
    pub recall_samples: u32,
}

impl Default for EvalGrid {
    fn default() -> Self {
        Self {
            classes: vec!["Car".into(), "Pedestrian".into(), "Cyclist".into()],
            difficulties: vec![0, 1, 2],
            metrics: MetricKind::ALL.to_vec(),
            iou_thresholds: BTreeMap::new(),
            ap_points: 11,
            recall_samples: crate::eval::DEFAULT_RECALL_SAMPLES,
        }
    }
}

impl EvalGrid {
    pub fn config(&self, class: &str, difficulty: u8, metric: MetricKind) -> EvalConfig {
        let mut cfg = EvalConfig::new(class, difficulty, metric.iou_kind());
        if let Some(&thr) = self.iou_thresholds.get(class) {
            cfg.iou_threshold = thr;
        }
        cfg.ap_points = self.ap_points;
        cfg.recall_samples = self.recall_samples;
        cfg
    }
}

/// Class row label used for the mean-over-classes row.
pub const OVERALL: &str = "Overall";

/// Values in percent (x100), stored at full precision; rounding to two
/// decimals happens only at render time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub classes: Vec<String>,
    pub difficulties: Vec<u8>,
    pub metrics: Vec<MetricKind>,
    cells: BTreeMap<(MetricKind, String, u8), f64>,
}

impl EvalReport {
    pub fn get(&self, metric: MetricKind, class: &str, difficulty: u8) -> Option<f64> {
        self.cells.get(&(metric, class.to_string(), difficulty)).copied()
    }

    pub fn overall(&self, metric: MetricKind, difficulty: u8) -> Option<f64> {
        self.get(metric, OVERALL, difficulty)
    }
}

/// Build the PR curve for one (class, difficulty, IoU kind) cell.
pub fn build_pr_curve(frames: &[Frame], cfg: &EvalConfig) -> PrCurve {
    let n_gt: usize = frames
        .iter()
        .map(|f| partition_frame(f, cfg).counted_gt.len())
        .sum();
    let scores = collect_match_scores(frames, cfg);
    let thresholds = score_thresholds(&scores, n_gt, cfg.recall_samples);
    let points = thresholds
        .iter()
        .map(|&threshold| {
            let c = count_at_threshold(frames, cfg, threshold);
            let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
            let deltas: Vec<f64> = c.matched_pairs.iter().map(|p| p.delta_theta).collect();
            PrPoint {
                threshold,
                precision: ratio(c.tp, c.tp + c.fp),
                recall: ratio(c.tp, c.tp + c.fn_),
                similarity: orientation_similarity(&deltas, (c.tp + c.fp) as usize),
            }
        })
        .collect();
    PrCurve { points }
}

fn interpolate(curve: &PrCurve, value: impl Fn(&PrPoint) -> f64, positions: u32) -> f64 {
    if curve.points.is_empty() {
        return 0.0;
    }
    // 11 positions are {0, 0.1, ..., 1}; 40 positions are {1/40, ..., 1}.
    let (first, denom) = if positions == 11 { (0u32, 10.0) } else { (1u32, 40.0) };
    let mut sum = 0.0;
    for k in first..(first + positions) {
        let r = k as f64 / denom;
        let max_at_or_after = curve
            .points
            .iter()
            .filter(|p| p.recall >= r - 1e-12)
            .map(&value)
            .fold(f64::NEG_INFINITY, f64::max);
        if max_at_or_after.is_finite() {
            sum += max_at_or_after;
        }
    }
    sum / positions as f64
}

/// Interpolated average precision: mean over equally spaced recall positions
/// of the maximum precision at that recall or beyond.
pub fn interpolated_ap(curve: &PrCurve, ap_points: u32) -> f64 {
    interpolate(curve, |p| p.precision, ap_points)
}

/// Orientation similarity over one threshold's positive detections:
/// sum of (1 + cos dtheta) / 2 over the matched pairs, normalized by the
/// number of positive detections (unmatched positives contribute 0).
pub fn orientation_similarity(deltas: &[f64], n_positive_dets: usize) -> f64 {
    if n_positive_dets == 0 {
        return 0.0;
    }
    let sum: f64 = deltas.iter().map(|d| (1.0 + d.cos()) / 2.0).sum();
    sum / n_positive_dets as f64
}

/// Average orientation similarity: 11-position interpolation of s(r) with
/// the same running-max scheme as AP.
pub fn aos(curve: &PrCurve) -> f64 {
    interpolate(curve, |p| p.similarity, 11)
}

/// Evaluate the full grid. Cell values are percentages; an `Overall` row per
/// (metric, difficulty) holds the unweighted mean over the classes.
pub fn evaluate(frames: &[Frame], grid: &EvalGrid) -> Result<EvalReport, EvalError> {
    for class in &grid.classes {
        let known = frames.iter().any(|f| {
            f.ground_truth.iter().chain(f.detections.iter()).any(|o| &o.class_name == class)
        });
        if !known {
            return Err(EvalError::UnknownClass(class.clone()));
        }
    }

    let mut report = EvalReport {
        classes: grid.classes.clone(),
        difficulties: grid.difficulties.clone(),
        metrics: grid.metrics.clone(),
        cells: BTreeMap::new(),
    };
    for &metric in &grid.metrics {
        for &difficulty in &grid.difficulties {
            let mut sum = 0.0;
            for class in &grid.classes {
                let cfg = grid.config(class, difficulty, metric);
                cfg.validate()?;
                let curve = build_pr_curve(frames, &cfg);
                let value = match metric {
                    MetricKind::Aos => aos(&curve),
                    _ => interpolated_ap(&curve, cfg.ap_points),
                };
                let pct = value * 100.0;
                report.cells.insert((metric, class.clone(), difficulty), pct);
                sum += pct;
            }
            report
                .cells
                .insert((metric, OVERALL.to_string(), difficulty), sum / grid.classes.len() as f64);
        }
    }
    Ok(report)
}
