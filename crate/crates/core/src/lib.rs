//! Evaluation toolkit for LiDAR 3D object detection on KITTI-format label
//! files: oriented-box IoU in the image plane, bird's-eye view, and 3D;
//! AP/AOS over per-class, per-difficulty grids; plus the detection loss
//! functions and inverted-dropout kernel used by the training recipe this
//! toolkit scores.

pub mod dropout;
pub mod eval;
pub mod geometry;
pub mod kitti;
pub mod losses;
pub mod metrics;

pub use eval::{Difficulty, DifficultyMode, EvalConfig, FramePartition, IouKind, MatchCounts};
pub use geometry::{BevRect, Box2D, ConvexPolygon, OrientedBox3D};
pub use kitti::{AnnotatedObject, Frame, LoadOutcome};
pub use metrics::{EvalGrid, EvalReport, MetricKind, PrCurve, PrPoint};
