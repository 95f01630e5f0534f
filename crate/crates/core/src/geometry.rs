//! Minimal 2D primitives used by the simulation: points, segments, rays,
//! oriented rectangles, and the two predicates the hot loop needs
//! (ray/segment distance for the rangefinder, rectangle/segment overlap for
//! collision).
//!
//! Numeric conventions that the rest of the crate relies on:
//!
//! * angles are radians, normalized to `(-pi, pi]` by [`normalize_angle`];
//! * all kernels are written so that reflecting a scene across the x axis
//!   (negating every `y` and every angle) negates/preserves results
//!   *bitwise*, not just within tolerance. That exactness is what makes the
//!   mirror-symmetry property of the steering networks testable with `==`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("degenerate segment: endpoints coincide at ({x}, {y})")]
    DegenerateSegment { x: f64, y: f64 },
    #[error("non-finite coordinate in {what}")]
    NonFinite { what: &'static str },
    #[error("oriented rect must have positive half-extents, got {half_length} x {half_width}")]
    EmptyRect { half_length: f64, half_width: f64 },
}

/// A point in the plane. Coordinates are expected to be finite; boundary
/// code (file loading, config validation) enforces that before anything
/// reaches the kernels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Euclidean distance to `other`.
    pub fn distance_to(self, other: Point) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

/// A non-degenerate line segment. Construction rejects coincident endpoints
/// so the intersection kernels never have to special-case zero-length input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    a: Point,
    b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeometryError> {
        if !(a.x.is_finite() && a.y.is_finite() && b.x.is_finite() && b.y.is_finite()) {
            return Err(GeometryError::NonFinite { what: "segment endpoint" });
        }
        if a == b {
            return Err(GeometryError::DegenerateSegment { x: a.x, y: a.y });
        }
        Ok(Segment { a, b })
    }

    pub fn a(&self) -> Point {
        self.a
    }

    pub fn b(&self) -> Point {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.a.distance_to(self.b)
    }
}

/// A ray: origin plus direction angle, normalized to `(-pi, pi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    origin: Point,
    angle: f64,
}

impl Ray {
    pub fn new(origin: Point, angle: f64) -> Self {
        debug_assert!(angle.is_finite());
        Ray { origin, angle: normalize_angle(angle) }
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Unit direction vector `(cos angle, sin angle)`.
    pub fn direction(&self) -> (f64, f64) {
        (self.angle.cos(), self.angle.sin())
    }
}

/// Normalizes an angle to `(-pi, pi]`.
///
/// Odd under negation except exactly at the branch cut: both `pi` and `-pi`
/// map to `pi`. Uses a single rounded-quotient subtraction so negating the
/// input negates the float operations exactly.
pub fn normalize_angle(angle: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = angle - tau * (angle / tau).round();
    // r lies in [-pi, pi]; fold the open end of the interval.
    if r == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        r
    }
}

/// Distance from the ray origin to its first intersection with `seg`, or
/// `None` if the ray misses.
///
/// Intersections behind the origin do not count; an intersection exactly at
/// the origin returns `Some(0.0)`. Collinear overlap returns the distance
/// to the nearest overlapping point. Parallel-but-offset returns `None`.
pub fn ray_segment_distance(ray: &Ray, seg: &Segment) -> Option<f64> {
    let (dx, dy) = ray.direction();
    let o = ray.origin();
    let sx = seg.b.x - seg.a.x;
    let sy = seg.b.y - seg.a.y;
    let qx = seg.a.x - o.x;
    let qy = seg.a.y - o.y;

    let denom = dx * sy - dy * sx; // r x s
    let q_cross_r = qx * dy - qy * dx;

    if denom == 0.0 {
        if q_cross_r != 0.0 {
            return None; // parallel, offset
        }
        // Collinear: project both endpoints onto the ray direction.
        let ta = qx * dx + qy * dy;
        let tb = (seg.b.x - o.x) * dx + (seg.b.y - o.y) * dy;
        let (tmin, tmax) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        if tmax < 0.0 {
            return None; // entirely behind the origin
        }
        return Some(tmin.max(0.0));
    }

    let t = (qx * sy - qy * sx) / denom;
    let u = q_cross_r / denom;
    if t >= 0.0 && (0.0..=1.0).contains(&u) {
        Some(t)
    } else {
        None
    }
}

/// A rectangle with arbitrary orientation: center, half-extents along its
/// local axes, and heading of the local +x axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedRect {
    pub center: Point,
    pub half_length: f64,
    pub half_width: f64,
    pub heading: f64,
}

impl OrientedRect {
    pub fn new(
        center: Point,
        half_length: f64,
        half_width: f64,
        heading: f64,
    ) -> Result<Self, GeometryError> {
        if !(center.x.is_finite()
            && center.y.is_finite()
            && half_length.is_finite()
            && half_width.is_finite()
            && heading.is_finite())
        {
            return Err(GeometryError::NonFinite { what: "oriented rect" });
        }
        if half_length <= 0.0 || half_width <= 0.0 {
            return Err(GeometryError::EmptyRect { half_length, half_width });
        }
        Ok(OrientedRect { center, half_length, half_width, heading })
    }

    /// Corners in local-frame order: (+l,+w), (-l,+w), (-l,-w), (+l,-w).
    pub fn corners(&self) -> [Point; 4] {
        let (s, c) = self.heading.sin_cos();
        let corner = |lx: f64, ly: f64| Point {
            x: self.center.x + c * lx - s * ly,
            y: self.center.y + s * lx + c * ly,
        };
        [
            corner(self.half_length, self.half_width),
            corner(-self.half_length, self.half_width),
            corner(-self.half_length, -self.half_width),
            corner(self.half_length, -self.half_width),
        ]
    }

    /// Edges as segments, corner i to corner i+1.
    pub fn edges(&self) -> [Segment; 4] {
        let c = self.corners();
        // Half-extents are positive, so consecutive corners never coincide.
        [
            Segment { a: c[0], b: c[1] },
            Segment { a: c[1], b: c[2] },
            Segment { a: c[2], b: c[3] },
            Segment { a: c[3], b: c[0] },
        ]
    }
}

/// True iff the segment touches or crosses the rectangle (boundary contact
/// counts). Works in the rectangle's local frame with an inclusive slab
/// clip.
pub fn rect_segment_intersects(rect: &OrientedRect, seg: &Segment) -> bool {
    let (s, c) = rect.heading.sin_cos();
    let to_local = |p: Point| {
        let px = p.x - rect.center.x;
        let py = p.y - rect.center.y;
        (c * px + s * py, -s * px + c * py)
    };
    let pa = to_local(seg.a);
    let pb = to_local(seg.b);
    // Canonical endpoint order makes the predicate exactly invariant under
    // segment reversal (the clip anchors on the first endpoint).
    let ((x0, y0), (x1, y1)) = if pa <= pb { (pa, pb) } else { (pb, pa) };
    segment_intersects_aabb(x0, y0, x1, y1, rect.half_length, rect.half_width)
}

/// Inclusive Liang-Barsky style clip of a segment against the AABB
/// `[-hx, hx] x [-hy, hy]`.
fn segment_intersects_aabb(x0: f64, y0: f64, x1: f64, y1: f64, hx: f64, hy: f64) -> bool {
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p0, d, h) in [(x0, x1 - x0, hx), (y0, y1 - y0, hy)] {
        if d == 0.0 {
            if p0 < -h || p0 > h {
                return false;
            }
        } else {
            let ta = (-h - p0) / d;
            let tb = (h - p0) / d;
            let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
            t0 = t0.max(lo);
            t1 = t1.min(hi);
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}
