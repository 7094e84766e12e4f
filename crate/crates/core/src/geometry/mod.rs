//! Convex planar domains with arclength boundary parametrization, chords,
//! half-planes, and the distance-to-arc machinery driving the level-line
//! construction.

mod boundary;
mod distance;
mod region;

pub use boundary::{project_to_boundary, rect_side, BoundaryArc, ConvexBoundary, RectSide};
pub use distance::{classify_distance_structure, distance_to_arc, DistanceClassification};
pub use region::{half_plane_region, ConvexRegion};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("arc has zero or negative length")]
    EmptyArc,
    #[error("arcs are not complementary on the same boundary")]
    NonComplementaryArcs,
    #[error("boundary is not convex: {0}")]
    NotConvex(String),
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

/// A point in the plane. Also used for free vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub type Vec2 = Point;

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn add(self, v: Vec2) -> Point {
        Point::new(self.x + v.x, self.y + v.y)
    }

    pub fn sub(self, p: Point) -> Vec2 {
        Point::new(self.x - p.x, self.y - p.y)
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, v: Vec2) -> f64 {
        self.x * v.x + self.y * v.y
    }

    /// z-component of the cross product, positive when `v` is counterclockwise of `self`.
    pub fn cross(self, v: Vec2) -> f64 {
        self.x * v.y - self.y * v.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, p: Point) -> f64 {
        (self.x - p.x).hypot(self.y - p.y)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Point::new(self.x / n, self.y / n)
    }

    /// Rotation by -pi/2: (x, y) -> (y, -x).
    pub fn rot_neg_quarter(self) -> Vec2 {
        Point::new(self.y, -self.x)
    }

    /// Rotation by +pi/2: (x, y) -> (-y, x).
    pub fn rot_quarter(self) -> Vec2 {
        Point::new(-self.y, self.x)
    }

    pub fn midpoint(self, p: Point) -> Point {
        Point::new(0.5 * (self.x + p.x), 0.5 * (self.y + p.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Straight segment with both endpoints on the boundary. By convexity its
/// interior lies in the open domain.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Chord {
    pub p: Point,
    pub q: Point,
}

impl Chord {
    pub fn new(p: Point, q: Point) -> Self {
        Chord { p, q }
    }

    pub fn length(&self) -> f64 {
        self.p.dist(self.q)
    }

    pub fn direction(&self) -> Vec2 {
        self.q.sub(self.p).normalized()
    }

    pub fn midpoint(&self) -> Point {
        self.p.midpoint(self.q)
    }

    /// Signed side of the chord's supporting line: positive on the left of p->q.
    pub fn side(&self, z: Point) -> f64 {
        self.q.sub(self.p).cross(z.sub(self.p))
    }

    /// Euclidean distance from `z` to the closed segment.
    pub fn distance_to(&self, z: Point) -> f64 {
        let d = self.q.sub(self.p);
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return z.dist(self.p);
        }
        let t = (z.sub(self.p).dot(d) / len2).clamp(0.0, 1.0);
        z.dist(self.p.add(d.scale(t)))
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.p.add(self.q.sub(self.p).scale(t))
    }
}

/// Closed half-plane given by an anchor point and a unit direction along its
/// boundary line; membership is a signed-distance test (>= 0 on the left of
/// the direction).
#[derive(Debug, Clone, Copy)]
pub struct HalfPlane {
    pub anchor: Point,
    pub direction: Vec2,
}

impl HalfPlane {
    pub fn new(anchor: Point, direction: Vec2) -> Self {
        HalfPlane {
            anchor,
            direction: direction.normalized(),
        }
    }

    /// Half-plane with boundary through `p` and `q`, oriented so that `inside`
    /// has nonnegative signed distance.
    pub fn through(p: Point, q: Point, inside: Point) -> Self {
        let dir = q.sub(p).normalized();
        let hp = HalfPlane::new(p, dir);
        if hp.signed_distance(inside) < 0.0 {
            HalfPlane::new(q, dir.scale(-1.0))
        } else {
            hp
        }
    }

    pub fn signed_distance(&self, z: Point) -> f64 {
        self.direction.cross(z.sub(self.anchor))
    }

    pub fn contains(&self, z: Point, tol: f64) -> bool {
        self.signed_distance(z) >= -tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_plane_membership_is_zero_on_anchor() {
        let hp = HalfPlane::new(Point::new(1.0, 2.0), Point::new(0.6, 0.8));
        assert_eq!(hp.signed_distance(Point::new(1.0, 2.0)), 0.0);
    }

    #[test]
    fn half_plane_through_orients_toward_inside() {
        let hp = HalfPlane::through(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 3.0));
        assert!(hp.signed_distance(Point::new(0.5, 3.0)) > 0.0);
        assert!(hp.signed_distance(Point::new(0.5, -3.0)) < 0.0);
    }

    #[test]
    fn chord_side_and_distance() {
        let c = Chord::new(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        assert!(c.side(Point::new(0.0, 1.0)) > 0.0);
        assert!(c.side(Point::new(0.0, -1.0)) < 0.0);
        assert_eq!(c.distance_to(Point::new(0.0, 0.5)), 0.5);
        assert_eq!(c.distance_to(Point::new(2.0, 0.0)), 1.0);
    }

    #[test]
    fn rotations_are_inverse() {
        let v = Point::new(0.3, -1.7);
        let w = v.rot_neg_quarter().rot_quarter();
        assert!((w.x - v.x).abs() < 1e-15 && (w.y - v.y).abs() < 1e-15);
        // R_{-pi/2}(1, 0) = (0, -1)
        let r = Point::new(1.0, 0.0).rot_neg_quarter();
        assert_eq!((r.x, r.y), (0.0, -1.0));
    }
}
