//! Shared fixture builders and random dataset generators for the
//! integration and acceptance suites.

#![allow(dead_code)]

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use kitti_eval::geometry::Box2D;
use kitti_eval::kitti::{AnnotatedObject, Frame};

pub fn gt_object(
    class: &str,
    truncation: f64,
    occlusion: i32,
    box2d: Box2D,
    dims: [f64; 3],
    location: [f64; 3],
    rotation_y: f64,
) -> AnnotatedObject {
    AnnotatedObject {
        class_name: class.to_string(),
        truncation,
        occlusion,
        alpha: 0.0,
        box2d,
        dims,
        location,
        rotation_y,
        score: None,
    }
}

pub fn with_score(obj: &AnnotatedObject, score: f64) -> AnnotatedObject {
    AnnotatedObject { score: Some(score), ..obj.clone() }
}

pub fn dont_care(box2d: Box2D) -> AnnotatedObject {
    AnnotatedObject {
        class_name: "DontCare".to_string(),
        truncation: -1.0,
        occlusion: -1,
        alpha: -10.0,
        box2d,
        dims: [-1.0, -1.0, -1.0],
        location: [-1000.0, -1000.0, -1000.0],
        rotation_y: -10.0,
        score: None,
    }
}

/// Hand-enumerated two-frame Car fixture. Expected cells (percent):
/// difficulty 0 -> 100 for all metrics; difficulties 1 and 2 ->
/// AP = 100 * (6 + 5 * 2/3) / 11 for 2D, BEV, and 3D, and
/// AOS = 100 * (6 + 5 * 0.5) / 11.
///
/// The enumeration: counted gt at level 1 are G1 (easy), G2 (moderate), and
/// G4 (difficulty -1, 20 px box). Matched scores are [0.9, 0.7], giving
/// thresholds [0.9, 0.7]. At 0.9: G1-D1 is the only TP (G4 is matched by the
/// 20 px detection D4 and drops out of FN), so (P, R, s) = (1, 0.5, 1). At
/// 0.7: G1-D1 and G2-D2 are TPs (D2 is yawed a quarter turn, contributing
/// similarity 0.5), D3 is absorbed by the DontCare region, D6 is the one FP,
/// so (P, R, s) = (2/3, 1, 0.5).
pub fn micro_car_fixture() -> Vec<Frame> {
    let quarter = std::f64::consts::FRAC_PI_2;
    let g1 = gt_object("Car", 0.0, 0, Box2D::new(100.0, 100.0, 200.0, 200.0), [2.0, 2.0, 4.0], [0.0, 1.5, 20.0], 0.0);
    let g2 = gt_object("Car", 0.0, 1, Box2D::new(300.0, 100.0, 360.0, 140.0), [2.0, 2.0, 2.0], [10.0, 1.5, 30.0], 0.0);
    let g3 = dont_care(Box2D::new(500.0, 100.0, 540.0, 160.0));
    let g4 = gt_object("Car", 0.0, 0, Box2D::new(50.0, 50.0, 90.0, 70.0), [2.0, 2.0, 4.0], [-10.0, 1.5, 40.0], 0.0);

    // D1: 2D box shifted (IoU 9/11 with G1), 3D identical to G1.
    let d1 = AnnotatedObject {
        box2d: Box2D::new(110.0, 100.0, 210.0, 200.0),
        score: Some(0.9),
        ..g1.clone()
    };
    // D2: same boxes as G2 but yawed a quarter turn (cube footprint, so the
    // BEV/3D overlap is still exact).
    let d2 = AnnotatedObject { rotation_y: quarter, score: Some(0.7), ..g2.clone() };
    // D3: mostly inside the DontCare region (overlap 0.875 of its own area).
    let d3 = gt_object("Car", 0.0, 0, Box2D::new(505.0, 100.0, 545.0, 160.0), [2.0, 2.0, 4.0], [100.0, 1.5, 100.0], 0.0);
    let d3 = with_score(&d3, 0.8);
    // D4: exact copy of the 20 px gt G4; fails every min-height requirement.
    let d4 = with_score(&g4, 0.95);
    // D5: clutter below every threshold the fixture generates.
    let d5 = gt_object("Car", 0.0, 0, Box2D::new(400.0, 300.0, 460.0, 340.0), [2.0, 2.0, 4.0], [50.0, 1.5, 60.0], 0.0);
    let d5 = with_score(&d5, 0.5);
    // D6: the one false positive at threshold 0.7.
    let d6 = gt_object("Car", 0.0, 0, Box2D::new(100.0, 100.0, 160.0, 140.0), [2.0, 2.0, 4.0], [-50.0, 1.5, 80.0], 0.0);
    let d6 = with_score(&d6, 0.85);

    vec![
        Frame {
            frame_id: "000001".into(),
            ground_truth: vec![g1, g2, g3],
            detections: vec![d1, d2, d3],
        },
        Frame {
            frame_id: "000002".into(),
            ground_truth: vec![g4],
            detections: vec![d4, d5, d6],
        },
    ]
}

/// Expected AP percentage for the micro fixture at difficulties 1 and 2.
pub fn micro_ap_moderate() -> f64 {
    100.0 * (6.0 + 5.0 * (2.0 / 3.0)) / 11.0
}

/// Expected AOS percentage for the micro fixture at difficulties 1 and 2.
pub fn micro_aos_moderate() -> f64 {
    100.0 * (6.0 + 5.0 * 0.5) / 11.0
}

/// Three-class fixture: the Car frames above plus a perfectly detected
/// Pedestrian and an undetected Cyclist.
pub fn three_class_fixture() -> Vec<Frame> {
    let mut frames = micro_car_fixture();
    let p1 = gt_object("Pedestrian", 0.0, 0, Box2D::new(100.0, 100.0, 140.0, 180.0), [1.8, 0.6, 0.8], [5.0, 1.5, 15.0], 0.3);
    let c1 = gt_object("Cyclist", 0.0, 0, Box2D::new(300.0, 100.0, 340.0, 180.0), [1.7, 0.6, 1.8], [-5.0, 1.5, 12.0], -0.5);
    let pd1 = with_score(&p1, 0.8);
    frames.push(Frame {
        frame_id: "000003".into(),
        ground_truth: vec![p1, c1],
        detections: vec![pd1],
    });
    frames
}

pub const CLASSES: [&str; 3] = ["Car", "Pedestrian", "Cyclist"];

fn random_gt(rng: &mut SmallRng, class: &str) -> AnnotatedObject {
    let left = rng.random_range(0.0..1000.0);
    let top = rng.random_range(0.0..300.0);
    let w = rng.random_range(20.0..120.0);
    let h = rng.random_range(15.0..130.0);
    gt_object(
        class,
        rng.random_range(0.0..0.6),
        rng.random_range(0..=3),
        Box2D::new(left, top, left + w, top + h),
        [
            rng.random_range(1.0..2.5),
            rng.random_range(0.5..2.5),
            rng.random_range(0.5..5.0),
        ],
        [
            rng.random_range(-40.0..40.0),
            rng.random_range(0.5..2.5),
            rng.random_range(5.0..70.0),
        ],
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
}

/// Dataset where every gt has at least height 46 px, zero occlusion and
/// truncation copies exist in each class, and detections are perturbed gt
/// copies plus clutter. Suitable for curve-shape properties.
pub fn random_dataset(seed: u64) -> Vec<Frame> {
    let mut rng = SmallRng::seed_from_u64(seed);
    let n_frames = rng.random_range(2..=5);
    let mut frames = Vec::new();
    for f in 0..n_frames {
        let mut ground_truth = Vec::new();
        let mut detections = Vec::new();
        for class in CLASSES {
            let n = rng.random_range(1..=4);
            for _ in 0..n {
                let gt = random_gt(&mut rng, class);
                if rng.random_bool(0.8) {
                    // Perturbed copy: keeps a high IoU with its own gt.
                    let dx = rng.random_range(-3.0..3.0);
                    let dy = rng.random_range(-3.0..3.0);
                    let det = AnnotatedObject {
                        box2d: Box2D::new(
                            gt.box2d.left + dx,
                            gt.box2d.top + dy,
                            gt.box2d.right + dx,
                            gt.box2d.bottom + dy,
                        ),
                        rotation_y: gt.rotation_y + rng.random_range(-0.3..0.3),
                        score: Some(rng.random_range(0.05..1.0)),
                        ..gt.clone()
                    };
                    detections.push(det);
                }
                ground_truth.push(gt);
            }
            // Clutter detections far from the labeled region.
            for _ in 0..rng.random_range(0..=2) {
                let mut det = random_gt(&mut rng, class);
                let shift = 2000.0 + rng.random_range(0.0..500.0);
                det.box2d = Box2D::new(
                    det.box2d.left + shift,
                    det.box2d.top,
                    det.box2d.right + shift,
                    det.box2d.bottom,
                );
                det.location[0] += 500.0;
                detections.push(with_score(&det, rng.random_range(0.05..1.0)));
            }
        }
        if rng.random_bool(0.3) {
            ground_truth.push(dont_care(Box2D::new(1500.0, 0.0, 1600.0, 80.0)));
        }
        frames.push(Frame { frame_id: format!("{f:06}"), ground_truth, detections });
    }
    frames
}

/// Ground truth only; the caller derives detections from it. Every class
/// gets at least one easy (tall, clean) object per dataset.
pub fn random_ground_truth(seed: u64) -> Vec<Frame> {
    let mut rng = SmallRng::seed_from_u64(seed);
    let n_frames = rng.random_range(2..=4);
    let mut frames = Vec::new();
    for f in 0..n_frames {
        let mut ground_truth = Vec::new();
        for class in CLASSES {
            let easy = AnnotatedObject {
                truncation: 0.0,
                occlusion: 0,
                ..random_gt(&mut rng, class)
            };
            let mut easy = easy;
            easy.box2d.bottom = easy.box2d.top + rng.random_range(50.0..130.0);
            ground_truth.push(easy);
            for _ in 0..rng.random_range(0..=3) {
                ground_truth.push(random_gt(&mut rng, class));
            }
        }
        frames.push(Frame { frame_id: format!("{f:06}"), ground_truth, detections: Vec::new() });
    }
    frames
}

/// Turn a gt-only dataset into its perfect detector: detections identical to
/// the ground truth with score 1.0 (DontCare rows are not copied).
pub fn perfect_detections(frames: &mut [Frame]) {
    for frame in frames.iter_mut() {
        frame.detections = frame
            .ground_truth
            .iter()
            .filter(|g| !g.is_dont_care())
            .map(|g| with_score(g, 1.0))
            .collect();
    }
}
