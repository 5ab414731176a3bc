//! Difficulty assignment, frame partitioning, score-threshold generation,
//! greedy matching, and TP/FP/FN counting.

use thiserror::Error;

use crate::geometry::{iou_2d, iou_3d, iou_bev};
use crate::kitti::{AnnotatedObject, Frame};

/// Gt height (px), max occlusion, and max truncation per difficulty tier.
pub const HEIGHT_THRESHOLDS: [f64; 3] = [45.0, 25.0, 25.0];
pub const OCCLUSION_THRESHOLDS: [i32; 3] = [0, 1, 2];
pub const TRUNCATION_THRESHOLDS: [f64; 3] = [0.15, 0.30, 0.50];

/// Minimum 2D detection height (px) per difficulty level, mirroring the gt
/// height tiers.
pub const MIN_DET_HEIGHT_PX: [f64; 3] = [45.0, 25.0, 25.0];

/// Default IoU threshold for a class: 0.7 for Car, 0.5 otherwise.
pub fn default_iou_threshold(class_name: &str) -> f64 {
    if class_name == "Car" {
        0.7
    } else {
        0.5
    }
}

/// Fraction of the detection's own 2D area that must overlap a DontCare
/// region for the detection to be suppressed as neither TP nor FP.
pub const DEFAULT_DONT_CARE_OVERLAP: f64 = 0.5;

pub const DEFAULT_RECALL_SAMPLES: u32 = 40;

/// Evaluation tier: 0 easy, 1 moderate, 2 hard, -1 neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Difficulty {
    Level(u8),
    Ignored,
}

impl Difficulty {
    pub fn as_i8(self) -> i8 {
        match self {
            Difficulty::Level(l) => l as i8,
            Difficulty::Ignored => -1,
        }
    }
}

/// How the three per-tier thresholds are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DifficultyMode {
    /// A box gets the easiest tier whose height, occlusion, and truncation
    /// caps it all meets.
    #[default]
    Cumulative,
    /// Each tier is an exclusive interval on all three attributes; a 30 px
    /// unoccluded, untruncated box comes out as -1 under this reading.
    LiteralIntervals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IouKind {
    TwoD,
    Bev,
    ThreeD,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("iou_threshold {0} outside (0, 1]")]
    IouThreshold(f64),
    #[error("difficulty level {0} outside 0..=2")]
    DifficultyLevel(u8),
    #[error("ap_points must be 11 or 40, got {0}")]
    ApPoints(u32),
    #[error("recall_samples must be >= 1")]
    RecallSamples,
}

/// Per-cell evaluation configuration: one class, one difficulty level, one
/// IoU kind.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub class_name: String,
    /// Level in 0..=2; gt with difficulty -1 or <= this level is counted.
    pub difficulty_level: u8,
    pub iou_kind: IouKind,
    pub iou_threshold: f64,
    pub min_det_height_px: f64,
    pub recall_samples: u32,
    /// 11 or 40 recall positions for AP interpolation.
    pub ap_points: u32,
    pub difficulty_mode: DifficultyMode,
    pub dont_care_overlap: f64,
}

impl EvalConfig {
    pub fn new(class_name: &str, difficulty_level: u8, iou_kind: IouKind) -> Self {
        Self {
            class_name: class_name.to_string(),
            difficulty_level,
            iou_kind,
            iou_threshold: default_iou_threshold(class_name),
            min_det_height_px: MIN_DET_HEIGHT_PX[difficulty_level.min(2) as usize],
            recall_samples: DEFAULT_RECALL_SAMPLES,
            ap_points: 11,
            difficulty_mode: DifficultyMode::Cumulative,
            dont_care_overlap: DEFAULT_DONT_CARE_OVERLAP,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.iou_threshold > 0.0 && self.iou_threshold <= 1.0) {
            return Err(ConfigError::IouThreshold(self.iou_threshold));
        }
        if self.difficulty_level > 2 {
            return Err(ConfigError::DifficultyLevel(self.difficulty_level));
        }
        if self.ap_points != 11 && self.ap_points != 40 {
            return Err(ConfigError::ApPoints(self.ap_points));
        }
        if self.recall_samples == 0 {
            return Err(ConfigError::RecallSamples);
        }
        Ok(())
    }
}

/// Index lists into one frame's gt and detection vectors. The gt-side lists
/// partition the frame's gt of the evaluated class plus its DontCare rows;
/// the det-side lists partition the detections of the class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FramePartition {
    /// Gt of the class with difficulty in {-1, 0, ..., level}.
    pub counted_gt: Vec<usize>,
    /// Gt of the class harder than the level; can absorb matches without
    /// TP credit.
    pub ignored_gt: Vec<usize>,
    pub dontcare_gt: Vec<usize>,
    /// Detections of the class meeting the 2D height requirement.
    pub candidate_det: Vec<usize>,
    /// Detections of the class below the height requirement.
    pub small_det: Vec<usize>,
}

/// One matched gt/det pair, with the yaw residual theta_gt - theta_det.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub gt_index: usize,
    pub det_index: usize,
    pub delta_theta: f64,
}

/// Totals over all frames at one score threshold. `matched_pairs` holds
/// only TP pairs (counted gt matched to a candidate detection).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub matched_pairs: Vec<MatchedPair>,
}

/// Assign the difficulty tier from 2D box height, occlusion, and truncation.
pub fn assign_difficulty(
    height_px: f64,
    occlusion: i32,
    truncation: f64,
    mode: DifficultyMode,
) -> Difficulty {
    match mode {
        DifficultyMode::Cumulative => {
            for level in 0..3usize {
                if height_px > HEIGHT_THRESHOLDS[level]
                    && occlusion <= OCCLUSION_THRESHOLDS[level]
                    && truncation <= TRUNCATION_THRESHOLDS[level]
                {
                    return Difficulty::Level(level as u8);
                }
            }
            Difficulty::Ignored
        }
        DifficultyMode::LiteralIntervals => {
            if height_px > 45.0 && occlusion <= 0 && truncation <= 0.15 {
                Difficulty::Level(0)
            } else if (25.0..=45.0).contains(&height_px)
                && height_px > 25.0
                && (1..=1).contains(&occlusion)
                && truncation > 0.15
                && truncation <= 0.30
            {
                Difficulty::Level(1)
            } else if (25.0..=45.0).contains(&height_px)
                && height_px > 25.0
                && (2..=2).contains(&occlusion)
                && truncation > 0.30
                && truncation <= 0.50
            {
                Difficulty::Level(2)
            } else {
                Difficulty::Ignored
            }
        }
    }
}

pub fn object_difficulty(obj: &AnnotatedObject, mode: DifficultyMode) -> Difficulty {
    assign_difficulty(obj.height_px(), obj.occlusion, obj.truncation, mode)
}

/// Split one frame's objects into the evaluation roles for `cfg`.
pub fn partition_frame(frame: &Frame, cfg: &EvalConfig) -> FramePartition {
    let mut part = FramePartition::default();
    for (i, gt) in frame.ground_truth.iter().enumerate() {
        if gt.is_dont_care() {
            part.dontcare_gt.push(i);
        } else if gt.class_name == cfg.class_name {
            match object_difficulty(gt, cfg.difficulty_mode) {
                Difficulty::Level(l) if l > cfg.difficulty_level => part.ignored_gt.push(i),
                _ => part.counted_gt.push(i),
            }
        }
    }
    for (i, det) in frame.detections.iter().enumerate() {
        if det.class_name == cfg.class_name {
            if det.height_px() >= cfg.min_det_height_px {
                part.candidate_det.push(i);
            } else {
                part.small_det.push(i);
            }
        }
    }
    part
}

fn pair_iou(gt: &AnnotatedObject, det: &AnnotatedObject, kind: IouKind) -> f64 {
    match kind {
        IouKind::TwoD => iou_2d(&gt.box2d, &det.box2d),
        IouKind::Bev => iou_bev(&gt.bev_rect(), &det.bev_rect()),
        IouKind::ThreeD => iou_3d(&gt.box3d(), &det.box3d()),
    }
}

/// Collect, over all frames, the scores of the detections that greedily
/// match a counted gt (gt in file order; among unmatched candidate
/// detections with IoU above the threshold, the highest IoU wins, ties going
/// to the earlier line). Sorted descending.
pub fn collect_match_scores(frames: &[Frame], cfg: &EvalConfig) -> Vec<f64> {
    let mut scores = Vec::new();
    for frame in frames {
        let part = partition_frame(frame, cfg);
        let mut det_matched = vec![false; frame.detections.len()];
        for &gi in &part.counted_gt {
            let gt = &frame.ground_truth[gi];
            let mut best: Option<(usize, f64)> = None;
            for &di in &part.candidate_det {
                if det_matched[di] {
                    continue;
                }
                let iou = pair_iou(gt, &frame.detections[di], cfg.iou_kind);
                if iou > cfg.iou_threshold && best.is_none_or(|(_, b)| iou > b) {
                    best = Some((di, iou));
                }
            }
            if let Some((di, _)) = best {
                det_matched[di] = true;
                scores.push(frame.detections[di].score.unwrap_or(0.0));
            }
        }
    }
    scores.sort_by(|a, b| b.partial_cmp(a).unwrap());
    scores
}

/// Score thresholds at the target recall grid k / recall_samples. For each
/// reachable target, the threshold is the ceil(r * n_gt)-th highest score
/// (the highest score for r = 0); duplicates are removed. Empty when there
/// are no scores or no gt.
pub fn score_thresholds(sorted_scores: &[f64], n_gt: usize, recall_samples: u32) -> Vec<f64> {
    let m = sorted_scores.len();
    if m == 0 || n_gt == 0 {
        return Vec::new();
    }
    let samples = recall_samples as usize;
    let mut thresholds = Vec::new();
    for k in 0..=samples {
        // r_k = k / samples is reachable iff r_k <= m / n_gt.
        if k * n_gt > samples * m {
            break;
        }
        let rank = (k * n_gt).div_ceil(samples).max(1);
        let score = sorted_scores[rank - 1];
        if thresholds.last() != Some(&score) {
            thresholds.push(score);
        }
    }
    thresholds
}

/// Greedy matching and TP/FP/FN counting at one score threshold, summed over
/// all frames.
///
/// Counted and ignored gt are visited in file order; each takes the unmatched
/// class detection (candidate or small) with the highest IoU above the
/// threshold, ties to the earlier detection. A pair counts as TP only when
/// the gt is counted and the detection is a candidate; a counted gt matched
/// only by a small detection is excluded from FN as well. Unmatched candidate
/// detections at or above the score threshold are FP unless most of their 2D
/// box lies inside a DontCare region.
pub fn count_at_threshold(frames: &[Frame], cfg: &EvalConfig, threshold: f64) -> MatchCounts {
    let mut counts = MatchCounts::default();
    for frame in frames {
        accumulate_frame(frame, cfg, threshold, &mut counts);
    }
    counts
}

fn accumulate_frame(frame: &Frame, cfg: &EvalConfig, threshold: f64, counts: &mut MatchCounts) {
    let part = partition_frame(frame, cfg);

    let mut is_candidate = vec![false; frame.detections.len()];
    let mut is_small = vec![false; frame.detections.len()];
    for &di in &part.candidate_det {
        is_candidate[di] = true;
    }
    for &di in &part.small_det {
        is_small[di] = true;
    }
    let eligible = |di: usize| {
        frame.detections[di].score.unwrap_or(f64::NEG_INFINITY) >= threshold
    };

    // Counted and ignored gt interleaved back into file order.
    let mut gt_order: Vec<(usize, bool)> = part
        .counted_gt
        .iter()
        .map(|&i| (i, true))
        .chain(part.ignored_gt.iter().map(|&i| (i, false)))
        .collect();
    gt_order.sort_by_key(|&(i, _)| i);

    let mut det_matched = vec![false; frame.detections.len()];
    for &(gi, counted) in &gt_order {
        let gt = &frame.ground_truth[gi];
        let mut best: Option<(usize, f64)> = None;
        for di in 0..frame.detections.len() {
            if !(is_candidate[di] || is_small[di]) || det_matched[di] || !eligible(di) {
                continue;
            }
            let iou = pair_iou(gt, &frame.detections[di], cfg.iou_kind);
            if iou > cfg.iou_threshold && best.is_none_or(|(_, b)| iou > b) {
                best = Some((di, iou));
            }
        }
        match best {
            Some((di, _)) => {
                det_matched[di] = true;
                if counted && is_candidate[di] {
                    counts.tp += 1;
                    counts.matched_pairs.push(MatchedPair {
                        gt_index: gi,
                        det_index: di,
                        delta_theta: gt.rotation_y - frame.detections[di].rotation_y,
                    });
                }
                // Counted gt matched via a small det, or any match on an
                // ignored gt: neither TP nor FN, and the det is consumed.
            }
            None => {
                if counted {
                    counts.fn_ += 1;
                }
            }
        }
    }

    for &di in &part.candidate_det {
        if det_matched[di] || !eligible(di) {
            continue;
        }
        let det = &frame.detections[di];
        let det_area = det.box2d.area();
        let in_dont_care = det_area > 0.0
            && part.dontcare_gt.iter().any(|&gi| {
                let dc = &frame.ground_truth[gi].box2d;
                det.box2d.intersection_area(dc) / det_area > cfg.dont_care_overlap
            });
        if !in_dont_care {
            counts.fp += 1;
        }
    }
}
