//! Overlap computation for axis-aligned 2D boxes, rotated bird's-eye-view
//! rectangles, and oriented 3D boxes.
//!
//! The BEV plane is the camera (x, z) plane; the vertical axis is camera y,
//! pointing down, with a box spanning `[y - h, y]` (KITTI places `location`
//! at the box base).

/// Axis-aligned box in image pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2D {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
}

impl Box2D {
    pub fn new(left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Self { left, top, right, bottom }
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn height(&self) -> f64 {
        self.bottom - self.top
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Intersection area with another box; 0 when disjoint.
    pub fn intersection_area(&self, other: &Box2D) -> f64 {
        let w = self.right.min(other.right) - self.left.max(other.left);
        let h = self.bottom.min(other.bottom) - self.top.max(other.top);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }
}

/// Rotated rectangle on the ground plane, in camera-frame meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BevRect {
    pub center_x: f64,
    pub center_z: f64,
    pub length: f64,
    pub width: f64,
    /// Yaw about the camera y-axis (`rotation_y`), radians.
    pub yaw: f64,
}

impl BevRect {
    pub fn area(&self) -> f64 {
        self.length * self.width
    }
}

/// Oriented 3D box: a BEV footprint plus a vertical extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox3D {
    pub bev: BevRect,
    /// Camera y of the box base (y points down, so this is the largest y).
    pub y_bottom: f64,
    pub height: f64,
}

impl OrientedBox3D {
    pub fn volume(&self) -> f64 {
        self.bev.area() * self.height
    }
}

/// Convex polygon in the (x, z) plane, vertices in counter-clockwise order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    pub vertices: Vec<[f64; 2]>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Self {
        Self { vertices }
    }

    /// Shoelace area; non-negative for CCW vertex order.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let mut sum = 0.0;
        for i in 0..v.len() {
            let [x0, z0] = v[i];
            let [x1, z1] = v[(i + 1) % v.len()];
            sum += x0 * z1 - x1 * z0;
        }
        0.5 * sum
    }
}

/// Intersection over union of two axis-aligned 2D boxes. Returns 0 when the
/// union has zero area.
pub fn iou_2d(a: &Box2D, b: &Box2D) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

/// Corners of a BEV rectangle after rotation by `yaw` about its center,
/// in CCW order.
pub fn bev_corners(r: &BevRect) -> ConvexPolygon {
    let (s, c) = r.yaw.sin_cos();
    let hl = 0.5 * r.length;
    let hw = 0.5 * r.width;
    // CCW in (x, z) before rotation; the rotation is orientation-preserving.
    let local = [[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]];
    let vertices = local
        .iter()
        .map(|&[dx, dz]| {
            [
                r.center_x + dx * c + dz * s,
                r.center_z - dx * s + dz * c,
            ]
        })
        .collect();
    ConvexPolygon::new(vertices)
}

// Intersections with area below this are treated as empty.
const DEGENERATE_AREA: f64 = 1e-12;

fn cross(ax: f64, az: f64, bx: f64, bz: f64, px: f64, pz: f64) -> f64 {
    (bx - ax) * (pz - az) - (bz - az) * (px - ax)
}

/// Clip `subject` against the half-plane on the left of directed edge a→b.
fn clip_halfplane(subject: &[[f64; 2]], a: [f64; 2], b: [f64; 2]) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(subject.len() + 1);
    let n = subject.len();
    for i in 0..n {
        let s = subject[i];
        let e = subject[(i + 1) % n];
        let sd = cross(a[0], a[1], b[0], b[1], s[0], s[1]);
        let ed = cross(a[0], a[1], b[0], b[1], e[0], e[1]);
        let s_in = sd >= 0.0;
        let e_in = ed >= 0.0;
        if s_in != e_in {
            let t = sd / (sd - ed);
            out.push([s[0] + (e[0] - s[0]) * t, s[1] + (e[1] - s[1]) * t]);
        }
        if e_in {
            out.push(e);
        }
    }
    out
}

/// Area of the intersection of two convex polygons, via iterative half-plane
/// clipping (Sutherland–Hodgman) followed by the shoelace formula.
pub fn convex_intersection_area(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    if a.vertices.len() < 3 || b.vertices.len() < 3 {
        return 0.0;
    }
    let mut poly = a.vertices.clone();
    let n = b.vertices.len();
    for i in 0..n {
        if poly.len() < 3 {
            return 0.0;
        }
        let edge_a = b.vertices[i];
        let edge_b = b.vertices[(i + 1) % n];
        poly = clip_halfplane(&poly, edge_a, edge_b);
    }
    let area = ConvexPolygon::new(poly).area();
    if area.abs() < DEGENERATE_AREA {
        0.0
    } else {
        area
    }
}

/// Intersection over union of two rotated BEV rectangles.
pub fn iou_bev(a: &BevRect, b: &BevRect) -> f64 {
    let inter = convex_intersection_area(&bev_corners(a), &bev_corners(b));
    let union = a.area() + b.area() - inter;
    if union > 0.0 {
        (inter / union).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Intersection over union of two oriented 3D boxes: BEV footprint overlap
/// times vertical interval overlap, over the union volume.
pub fn iou_3d(a: &OrientedBox3D, b: &OrientedBox3D) -> f64 {
    let y_overlap = a.y_bottom.min(b.y_bottom) - (a.y_bottom - a.height).max(b.y_bottom - b.height);
    if y_overlap <= 0.0 {
        return 0.0;
    }
    let bev_inter = convex_intersection_area(&bev_corners(&a.bev), &bev_corners(&b.bev));
    let inter = bev_inter * y_overlap;
    let union = a.volume() + b.volume() - inter;
    if union > 0.0 {
        (inter / union).clamp(0.0, 1.0)
    } else {
        0.0
    }
}
