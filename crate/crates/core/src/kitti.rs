//! Reading and writing of KITTI-style label and detection files.
//!
//! One object per line, whitespace separated:
//! `type truncated occluded alpha bbox_left bbox_top bbox_right bbox_bottom
//! height width length x y z rotation_y [score]`
//! (15 fields for ground truth, 16 for detections). Directory layout is
//! `<dir>/<frame_id>.txt`, one file per frame.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geometry::{BevRect, Box2D, OrientedBox3D};

pub const DONT_CARE: &str = "DontCare";

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: expected {expected} fields, got {got}")]
    Arity { line: usize, expected: usize, got: usize },
    #[error("line {line}: field {field} ({name}): invalid numeric token {token:?}")]
    Numeric { line: usize, field: usize, name: &'static str, token: String },
    #[error("line {line}: {message}")]
    Validation { line: usize, message: String },
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
}

/// One labeled object, shared between ground truth and detections.
/// Detections carry a `score`; ground-truth objects do not.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedObject {
    pub class_name: String,
    /// Fraction in [0, 1]; -1 for DontCare.
    pub truncation: f64,
    /// 0..=3; -1 for DontCare.
    pub occlusion: i32,
    /// Observation angle, radians.
    pub alpha: f64,
    pub box2d: Box2D,
    /// (height, width, length) in meters.
    pub dims: [f64; 3],
    /// Camera-frame (x, y, z) in meters; y points down; bottom-center of the box.
    pub location: [f64; 3],
    /// Yaw about the camera y-axis, radians.
    pub rotation_y: f64,
    pub score: Option<f64>,
}

impl AnnotatedObject {
    pub fn is_dont_care(&self) -> bool {
        self.class_name == DONT_CARE
    }

    /// Height of the 2D box in pixels.
    pub fn height_px(&self) -> f64 {
        self.box2d.height()
    }

    pub fn bev_rect(&self) -> BevRect {
        BevRect {
            center_x: self.location[0],
            center_z: self.location[2],
            length: self.dims[2],
            width: self.dims[1],
            yaw: self.rotation_y,
        }
    }

    pub fn box3d(&self) -> OrientedBox3D {
        OrientedBox3D {
            bev: self.bev_rect(),
            y_bottom: self.location[1],
            height: self.dims[0],
        }
    }

    fn validate(&self, line: usize) -> Result<(), ParseError> {
        let err = |message: String| ParseError::Validation { line, message };
        if self.box2d.right < self.box2d.left {
            return Err(err(format!(
                "right < left ({} < {})",
                self.box2d.right, self.box2d.left
            )));
        }
        if self.box2d.bottom < self.box2d.top {
            return Err(err(format!(
                "bottom < top ({} < {})",
                self.box2d.bottom, self.box2d.top
            )));
        }
        if !self.is_dont_care() {
            if self.dims.iter().any(|&d| d <= 0.0) {
                return Err(err(format!("non-positive dimensions {:?}", self.dims)));
            }
            if !(0.0..=1.0).contains(&self.truncation) {
                return Err(err(format!("truncation {} outside [0, 1]", self.truncation)));
            }
        }
        if let Some(s) = self.score {
            if !s.is_finite() {
                return Err(err(format!("non-finite score {s}")));
            }
        }
        Ok(())
    }
}

/// Paired ground truth and detections for one sample, in file line order.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub frame_id: String,
    pub ground_truth: Vec<AnnotatedObject>,
    pub detections: Vec<AnnotatedObject>,
}

/// Result of [`load_dataset`]: frames sorted by id, plus any detection files
/// that had no ground-truth counterpart and were skipped.
#[derive(Debug, Clone, Default)]
pub struct LoadOutcome {
    pub frames: Vec<Frame>,
    pub skipped_detection_files: Vec<PathBuf>,
}

const FIELD_NAMES: [&str; 16] = [
    "type", "truncated", "occluded", "alpha", "bbox_left", "bbox_top", "bbox_right",
    "bbox_bottom", "height", "width", "length", "x", "y", "z", "rotation_y", "score",
];

/// Parse one label line. `expect_score` selects the 16-field detection form;
/// `line_no` is used in error messages only.
pub fn parse_object_line_at(
    line: &str,
    expect_score: bool,
    line_no: usize,
) -> Result<AnnotatedObject, ParseError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let expected = if expect_score { 16 } else { 15 };
    if tokens.len() != expected {
        return Err(ParseError::Arity { line: line_no, expected, got: tokens.len() });
    }
    let num = |field: usize| -> Result<f64, ParseError> {
        tokens[field].parse::<f64>().map_err(|_| ParseError::Numeric {
            line: line_no,
            field,
            name: FIELD_NAMES[field],
            token: tokens[field].to_string(),
        })
    };
    let occlusion_raw = num(2)?;
    let obj = AnnotatedObject {
        class_name: tokens[0].to_string(),
        truncation: num(1)?,
        occlusion: occlusion_raw as i32,
        alpha: num(3)?,
        box2d: Box2D::new(num(4)?, num(5)?, num(6)?, num(7)?),
        dims: [num(8)?, num(9)?, num(10)?],
        location: [num(11)?, num(12)?, num(13)?],
        rotation_y: num(14)?,
        score: if expect_score { Some(num(15)?) } else { None },
    };
    obj.validate(line_no)?;
    Ok(obj)
}

/// Parse one label line (15 fields, or 16 when `expect_score`).
pub fn parse_object_line(line: &str, expect_score: bool) -> Result<AnnotatedObject, ParseError> {
    parse_object_line_at(line, expect_score, 1)
}

/// Render an object back to its file line. Numeric fields use fixed-point
/// 6-decimal formatting except `occluded`, which is an integer;
/// `parse(format(x))` equals `x` to 6 decimal places.
pub fn format_object_line(obj: &AnnotatedObject) -> String {
    let mut out = String::with_capacity(128);
    write!(
        out,
        "{} {:.6} {} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6}",
        obj.class_name,
        obj.truncation,
        obj.occlusion,
        obj.alpha,
        obj.box2d.left,
        obj.box2d.top,
        obj.box2d.right,
        obj.box2d.bottom,
        obj.dims[0],
        obj.dims[1],
        obj.dims[2],
        obj.location[0],
        obj.location[1],
        obj.location[2],
        obj.rotation_y,
    )
    .unwrap();
    if let Some(score) = obj.score {
        write!(out, " {score:.6}").unwrap();
    }
    out
}

fn parse_file(path: &Path, expect_score: bool) -> Result<Vec<AnnotatedObject>, IoError> {
    let text = fs::read_to_string(path)
        .map_err(|source| IoError::Io { path: path.to_path_buf(), source })?;
    let mut objects = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let obj = parse_object_line_at(line, expect_score, idx + 1)
            .map_err(|source| IoError::Parse { path: path.to_path_buf(), source })?;
        objects.push(obj);
    }
    Ok(objects)
}

fn txt_stems(dir: &Path) -> Result<BTreeMap<String, PathBuf>, IoError> {
    let mut stems = BTreeMap::new();
    let entries = fs::read_dir(dir)
        .map_err(|source| IoError::Io { path: dir.to_path_buf(), source })?;
    for entry in entries {
        let entry = entry.map_err(|source| IoError::Io { path: dir.to_path_buf(), source })?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("txt") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                stems.insert(stem.to_string(), path.clone());
            }
        }
    }
    Ok(stems)
}

/// Load a paired dataset: one frame per ground-truth file, joined to the
/// detection file with the same stem (string equality, so "000001" != "1").
/// A gt file with no detection counterpart gets an empty detection list;
/// a detection file with no gt counterpart is skipped and reported.
pub fn load_dataset(gt_dir: &Path, det_dir: &Path) -> Result<LoadOutcome, IoError> {
    let gt_files = txt_stems(gt_dir)?;
    let det_files = txt_stems(det_dir)?;

    let mut outcome = LoadOutcome::default();
    // BTreeMap iteration keeps frames sorted by frame_id.
    for (stem, gt_path) in &gt_files {
        let ground_truth = parse_file(gt_path, false)?;
        let detections = match det_files.get(stem) {
            Some(det_path) => parse_file(det_path, true)?,
            None => Vec::new(),
        };
        outcome.frames.push(Frame { frame_id: stem.clone(), ground_truth, detections });
    }
    for (stem, det_path) in &det_files {
        if !gt_files.contains_key(stem) {
            outcome.skipped_detection_files.push(det_path.clone());
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const CAR_LINE: &str =
        "Car 0.00 0 1.57 100.0 120.0 200.0 170.0 1.50 1.60 3.90 1.00 1.50 20.00 1.50";
    const DONT_CARE_LINE: &str =
        "DontCare -1 -1 -10 500.0 150.0 520.0 160.0 -1 -1 -1 -1000 -1000 -1000 -10";

    #[test]
    fn parses_plain_car_line() {
        let obj = parse_object_line(CAR_LINE, false).unwrap();
        assert_eq!(obj.class_name, "Car");
        assert_eq!(obj.truncation, 0.0);
        assert_eq!(obj.occlusion, 0);
        assert_abs_diff_eq!(obj.alpha, 1.57);
        assert_eq!(obj.box2d, Box2D::new(100.0, 120.0, 200.0, 170.0));
        assert_eq!(obj.dims, [1.5, 1.6, 3.9]);
        assert_eq!(obj.location, [1.0, 1.5, 20.0]);
        assert_abs_diff_eq!(obj.rotation_y, 1.5);
        assert_eq!(obj.score, None);
        assert_abs_diff_eq!(obj.height_px(), 50.0);
    }

    #[test]
    fn parses_dont_care_sentinels() {
        let obj = parse_object_line(DONT_CARE_LINE, false).unwrap();
        assert!(obj.is_dont_care());
        assert_eq!(obj.truncation, -1.0);
        assert_eq!(obj.occlusion, -1);
        assert_eq!(obj.dims, [-1.0, -1.0, -1.0]);
        assert_eq!(obj.location, [-1000.0, -1000.0, -1000.0]);
        assert_eq!(obj.rotation_y, -10.0);
    }

    #[test]
    fn rejects_wrong_arity() {
        let line = "Car 0.0 0 1.5 1 2 3 4 1 1 1 0 0 0";
        match parse_object_line(line, false) {
            Err(ParseError::Arity { expected: 15, got: 14, .. }) => {}
            other => panic!("expected arity error, got {other:?}"),
        }
        // 15 tokens with expect_score=true is also an arity error.
        assert!(matches!(
            parse_object_line(CAR_LINE, true),
            Err(ParseError::Arity { expected: 16, got: 15, .. })
        ));
    }

    #[test]
    fn rejects_non_numeric_token() {
        let line = CAR_LINE.replace("1.57", "abc");
        assert!(matches!(
            parse_object_line(&line, false),
            Err(ParseError::Numeric { name: "alpha", .. })
        ));
    }

    #[test]
    fn rejects_invalid_invariants() {
        // right < left
        let line = "Car 0.00 0 1.57 200.0 120.0 100.0 170.0 1.50 1.60 3.90 1.00 1.50 20.00 1.50";
        assert!(matches!(parse_object_line(line, false), Err(ParseError::Validation { .. })));
        // zero dims on a non-DontCare class
        let line = "Car 0.00 0 1.57 100.0 120.0 200.0 170.0 0.0 1.60 3.90 1.00 1.50 20.00 1.50";
        assert!(matches!(parse_object_line(line, false), Err(ParseError::Validation { .. })));
        // truncation out of range
        let line = "Car 1.20 0 1.57 100.0 120.0 200.0 170.0 1.50 1.60 3.90 1.00 1.50 20.00 1.50";
        assert!(matches!(parse_object_line(line, false), Err(ParseError::Validation { .. })));
    }

    #[test]
    fn unknown_class_is_carried_through() {
        let line = CAR_LINE.replace("Car", "Van");
        let obj = parse_object_line(&line, false).unwrap();
        assert_eq!(obj.class_name, "Van");
    }

    #[test]
    fn round_trips_plain_line() {
        let obj = parse_object_line(CAR_LINE, false).unwrap();
        let rendered = format_object_line(&obj);
        let reparsed = parse_object_line(&rendered, false).unwrap();
        assert_eq!(obj, reparsed);
        assert_eq!(rendered, format_object_line(&reparsed));
    }

    #[test]
    fn formats_score_with_six_decimals() {
        let line = format!("{CAR_LINE} 0.875");
        let obj = parse_object_line(&line, true).unwrap();
        let rendered = format_object_line(&obj);
        assert!(rendered.ends_with(" 0.875000"), "{rendered}");
    }

    #[test]
    fn round_trips_dont_care_sentinels() {
        let obj = parse_object_line(DONT_CARE_LINE, false).unwrap();
        let rendered = format_object_line(&obj);
        let reparsed = parse_object_line(&rendered, false).unwrap();
        assert_eq!(obj, reparsed);
        assert!(rendered.contains("-1000.000000"));
        assert!(rendered.starts_with("DontCare -1.000000 -1 "));
    }

    fn write_file(dir: &Path, name: &str, content: &str) {
        fs::write(dir.join(name), content).unwrap();
    }

    #[test]
    fn load_pairs_by_stem_and_tolerates_missing_detections() {
        let gt = tempfile::tempdir().unwrap();
        let det = tempfile::tempdir().unwrap();
        write_file(gt.path(), "000001.txt", CAR_LINE);
        write_file(gt.path(), "000002.txt", &format!("{CAR_LINE}\n{DONT_CARE_LINE}\n"));
        write_file(det.path(), "000001.txt", &format!("{CAR_LINE} 0.9\n"));

        let out = load_dataset(gt.path(), det.path()).unwrap();
        assert_eq!(out.frames.len(), 2);
        assert_eq!(out.frames[0].frame_id, "000001");
        assert_eq!(out.frames[0].detections.len(), 1);
        assert_eq!(out.frames[1].frame_id, "000002");
        assert_eq!(out.frames[1].ground_truth.len(), 2);
        assert!(out.frames[1].detections.is_empty());
        assert!(out.skipped_detection_files.is_empty());
    }

    #[test]
    fn load_empty_gt_file_with_detections() {
        let gt = tempfile::tempdir().unwrap();
        let det = tempfile::tempdir().unwrap();
        write_file(gt.path(), "000007.txt", "");
        let dets: String = (0..3).map(|_| format!("{CAR_LINE} 0.5\n")).collect();
        write_file(det.path(), "000007.txt", &dets);

        let out = load_dataset(gt.path(), det.path()).unwrap();
        assert_eq!(out.frames.len(), 1);
        assert!(out.frames[0].ground_truth.is_empty());
        assert_eq!(out.frames[0].detections.len(), 3);
    }

    #[test]
    fn load_reports_orphan_detection_files() {
        let gt = tempfile::tempdir().unwrap();
        let det = tempfile::tempdir().unwrap();
        write_file(det.path(), "999999.txt", &format!("{CAR_LINE} 0.5\n"));

        let out = load_dataset(gt.path(), det.path()).unwrap();
        assert!(out.frames.is_empty());
        assert_eq!(out.skipped_detection_files.len(), 1);
        assert!(out.skipped_detection_files[0].ends_with("999999.txt"));
    }

    #[test]
    fn load_missing_directory_is_io_error() {
        let det = tempfile::tempdir().unwrap();
        let missing = det.path().join("nope");
        assert!(matches!(load_dataset(&missing, det.path()), Err(IoError::Io { .. })));
    }

    #[test]
    fn stems_are_compared_as_strings() {
        let gt = tempfile::tempdir().unwrap();
        let det = tempfile::tempdir().unwrap();
        write_file(gt.path(), "000001.txt", CAR_LINE);
        write_file(det.path(), "1.txt", &format!("{CAR_LINE} 0.9\n"));

        let out = load_dataset(gt.path(), det.path()).unwrap();
        assert!(out.frames[0].detections.is_empty());
        assert_eq!(out.skipped_detection_files.len(), 1);
    }
}
