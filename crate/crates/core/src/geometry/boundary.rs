//! Closed convex boundary curves with arclength parametrization.
//!
//! Circles and rectangles have analytic fast paths; superellipses and
//! polylines go through a dense arclength table. All boundaries are
//! positively oriented (interior on the left of the tangent), so the
//! (outward normal, tangent) frame is positively oriented.

use super::{GeometryError, Point, Vec2};
use std::sync::Arc;

/// Relative tolerance for parameter comparisons, scaled by total length.
pub const PARAM_REL_TOL: f64 = 1e-9;

const TABLE_SAMPLES: usize = 32768;

#[derive(Debug, Clone)]
enum Kind {
    Circle {
        radius: f64,
    },
    /// Axis-aligned rectangle (-l, l) x (-h, h), parametrized counterclockwise
    /// from the corner (l, -h).
    Rectangle {
        l: f64,
        h: f64,
    },
    /// |x/a|^p + |y/a|^p = 1 via a dense arclength table over the angular
    /// parameter; normals come from the analytic gradient.
    Superellipse {
        p: f64,
        scale: f64,
        table: ArcTable,
    },
    Polyline {
        table: ArcTable,
    },
}

/// Cumulative-arclength sample table: s[k] -> vertex[k], closed.
#[derive(Debug, Clone)]
struct ArcTable {
    s: Vec<f64>,
    pts: Vec<Point>,
    total: f64,
}

impl ArcTable {
    fn build(pts: Vec<Point>) -> ArcTable {
        let n = pts.len();
        let mut s = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        s.push(0.0);
        for k in 1..=n {
            acc += pts[k - 1].dist(pts[k % n]);
            s.push(acc);
        }
        ArcTable { s, pts, total: acc }
    }

    fn segment_of(&self, s: f64) -> (usize, f64) {
        // binary search for k with s[k] <= s < s[k+1]
        let mut lo = 0usize;
        let mut hi = self.s.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.s[mid] <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let seg_len = self.s[lo + 1] - self.s[lo];
        let frac = if seg_len > 0.0 { (s - self.s[lo]) / seg_len } else { 0.0 };
        (lo, frac)
    }

    fn point_at(&self, s: f64) -> Point {
        let (k, frac) = self.segment_of(s);
        let a = self.pts[k];
        let b = self.pts[(k + 1) % self.pts.len()];
        a.add(b.sub(a).scale(frac))
    }

    fn tangent_at(&self, s: f64) -> Vec2 {
        let (k, _) = self.segment_of(s);
        let a = self.pts[k];
        let b = self.pts[(k + 1) % self.pts.len()];
        b.sub(a).normalized()
    }
}

/// A closed, positively oriented convex boundary curve.
#[derive(Debug, Clone)]
pub struct ConvexBoundary {
    kind: Kind,
    total_length: f64,
    diameter: f64,
    strictly_convex: bool,
}

/// Side labels for the rectangle parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RectSide {
    Right,
    Top,
    Left,
    Bottom,
}

impl ConvexBoundary {
    pub fn circle(radius: f64) -> Arc<ConvexBoundary> {
        assert!(radius > 0.0, "circle radius must be positive");
        Arc::new(ConvexBoundary {
            kind: Kind::Circle { radius },
            total_length: 2.0 * std::f64::consts::PI * radius,
            diameter: 2.0 * radius,
            strictly_convex: true,
        })
    }

    pub fn rectangle(l: f64, h: f64) -> Arc<ConvexBoundary> {
        assert!(l > 0.0 && h > 0.0, "rectangle half-sides must be positive");
        Arc::new(ConvexBoundary {
            kind: Kind::Rectangle { l, h },
            total_length: 4.0 * (l + h),
            diameter: 2.0 * (l * l + h * h).sqrt(),
            strictly_convex: false,
        })
    }

    /// Superellipse |x|^p + |y|^p = scale^p, p > 2.
    pub fn superellipse(p: f64, scale: f64) -> Arc<ConvexBoundary> {
        assert!(p > 2.0 && scale > 0.0);
        let mut pts = Vec::with_capacity(TABLE_SAMPLES);
        for k in 0..TABLE_SAMPLES {
            let phi = 2.0 * std::f64::consts::PI * (k as f64) / (TABLE_SAMPLES as f64);
            pts.push(superellipse_point(phi, p, scale));
        }
        // Resample uniformly in arclength so s lookups stay well conditioned.
        let rough = ArcTable::build(pts);
        let mut uniform = Vec::with_capacity(TABLE_SAMPLES);
        for k in 0..TABLE_SAMPLES {
            let s = rough.total * (k as f64) / (TABLE_SAMPLES as f64);
            uniform.push(rough.point_at(s));
        }
        let table = ArcTable::build(uniform);
        let total = table.total;
        Arc::new(ConvexBoundary {
            kind: Kind::Superellipse { p, scale, table },
            total_length: total,
            diameter: 2.0 * scale,
            strictly_convex: true,
        })
    }

    /// Closed convex polyline through the given vertices (positively oriented).
    pub fn polyline(vertices: Vec<Point>) -> Result<Arc<ConvexBoundary>, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewSamples { min: 3, got: vertices.len() });
        }
        let n = vertices.len();
        let mut diameter: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                diameter = diameter.max(vertices[i].dist(vertices[j]));
            }
        }
        let tol = 1e-12 * diameter * diameter;
        let mut strictly_convex = true;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let cr = b.sub(a).cross(c.sub(b));
            if cr < -tol {
                return Err(GeometryError::NotConvex(format!(
                    "negative turn at vertex {}",
                    (i + 1) % n
                )));
            }
            if cr <= tol {
                strictly_convex = false;
            }
        }
        let table = ArcTable::build(vertices);
        let total = table.total;
        Ok(Arc::new(ConvexBoundary {
            kind: Kind::Polyline { table },
            total_length: total,
            diameter,
            strictly_convex,
        }))
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn strictly_convex(&self) -> bool {
        self.strictly_convex
    }

    pub fn param_tol(&self) -> f64 {
        PARAM_REL_TOL * self.total_length
    }

    pub fn wrap(&self, s: f64) -> f64 {
        let l = self.total_length;
        let mut w = s % l;
        if w < 0.0 {
            w += l;
        }
        w
    }

    /// Point at arclength parameter `s` (taken mod total length).
    pub fn point_at(&self, s: f64) -> Point {
        let s = self.wrap(s);
        match &self.kind {
            Kind::Circle { radius } => {
                let th = s / radius;
                Point::new(radius * th.cos(), radius * th.sin())
            }
            Kind::Rectangle { l, h } => {
                let (side, u) = rect_side(s, *l, *h);
                match side {
                    RectSide::Right => Point::new(*l, -h + u),
                    RectSide::Top => Point::new(l - u, *h),
                    RectSide::Left => Point::new(-l, h - u),
                    RectSide::Bottom => Point::new(-l + u, -h),
                }
            }
            Kind::Superellipse { table, .. } | Kind::Polyline { table } => table.point_at(s),
        }
    }

    /// Unit tangent in the direction of increasing `s` (counterclockwise).
    /// Rectangle and polyline corners take the tangent of the following side.
    pub fn tangent_at(&self, s: f64) -> Vec2 {
        let s = self.wrap(s);
        match &self.kind {
            Kind::Circle { radius } => {
                let th = s / radius;
                Point::new(-th.sin(), th.cos())
            }
            Kind::Rectangle { l, h } => {
                let (side, _) = rect_side(s, *l, *h);
                match side {
                    RectSide::Right => Point::new(0.0, 1.0),
                    RectSide::Top => Point::new(-1.0, 0.0),
                    RectSide::Left => Point::new(0.0, -1.0),
                    RectSide::Bottom => Point::new(1.0, 0.0),
                }
            }
            Kind::Superellipse { p, scale, table } => {
                // Analytic normal from the gradient of |x|^p + |y|^p, rotated.
                let pt = table.point_at(s);
                superellipse_normal(pt, *p, *scale).rot_quarter()
            }
            Kind::Polyline { table } => table.tangent_at(s),
        }
    }

    /// Outward unit normal; (normal, tangent) is positively oriented.
    pub fn outward_normal_at(&self, s: f64) -> Vec2 {
        self.tangent_at(s).rot_neg_quarter()
    }

    /// Signed distance sense: true when `z` lies strictly inside the domain.
    pub fn contains(&self, z: Point, tol: f64) -> bool {
        match &self.kind {
            Kind::Circle { radius } => z.norm() < radius - tol,
            Kind::Rectangle { l, h } => z.x.abs() < l - tol && z.y.abs() < h - tol,
            Kind::Superellipse { p, scale, .. } => {
                (z.x / scale).abs().powf(*p) + (z.y / scale).abs().powf(*p)
                    < 1.0 - tol / scale
            }
            Kind::Polyline { table } => {
                let n = table.pts.len();
                for i in 0..n {
                    let a = table.pts[i];
                    let b = table.pts[(i + 1) % n];
                    if b.sub(a).cross(z.sub(a)) <= tol * b.sub(a).norm() {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Parameter of a nearest boundary point to `p`; ties break to smallest s.
    pub fn project(&self, p: Point) -> f64 {
        match &self.kind {
            Kind::Circle { radius } => {
                let r = p.norm();
                if r == 0.0 {
                    return 0.0;
                }
                let th = p.y.atan2(p.x);
                self.wrap(th * radius)
            }
            Kind::Rectangle { l, h } => {
                // Candidate feet on each of the four sides; pick nearest,
                // smallest s on ties.
                let feet = [
                    Point::new(*l, p.y.clamp(-h, *h)),
                    Point::new(p.x.clamp(-l, *l), *h),
                    Point::new(-l, p.y.clamp(-h, *h)),
                    Point::new(p.x.clamp(-l, *l), -h),
                ];
                let mut best_s = 0.0;
                let mut best_d = f64::INFINITY;
                for foot in feet {
                    let s = self.rect_param_of(foot);
                    let d = p.dist(foot);
                    if d < best_d - 1e-15 * self.diameter
                        || (d <= best_d + 1e-15 * self.diameter && s < best_s)
                    {
                        best_d = d;
                        best_s = s;
                    }
                }
                best_s
            }
            Kind::Superellipse { table, .. } | Kind::Polyline { table } => {
                let n = table.pts.len();
                let mut best = (f64::INFINITY, 0.0);
                for i in 0..n {
                    let a = table.pts[i];
                    let b = table.pts[(i + 1) % n];
                    let d = b.sub(a);
                    let len2 = d.dot(d);
                    let t = if len2 > 0.0 {
                        (p.sub(a).dot(d) / len2).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    let foot = a.add(d.scale(t));
                    let dist = p.dist(foot);
                    let s = table.s[i] + t * (table.s[i + 1] - table.s[i]);
                    if dist < best.0 - 1e-15 * self.diameter
                        || (dist <= best.0 + 1e-15 * self.diameter && s < best.1)
                    {
                        best = (dist, s);
                    }
                }
                best.1
            }
        }
    }

    /// Rectangle-only: parameter of a point already on the boundary.
    fn rect_param_of(&self, p: Point) -> f64 {
        let Kind::Rectangle { l, h } = self.kind else {
            unreachable!()
        };
        let eps = 1e-12 * self.diameter;
        if (p.x - l).abs() < eps {
            return p.y + h;
        }
        if (p.y - h).abs() < eps {
            return 2.0 * h + (l - p.x);
        }
        if (p.x + l).abs() < eps {
            return 2.0 * h + 2.0 * l + (h - p.y);
        }
        self.wrap(4.0 * h + 2.0 * l + (p.x + l))
    }
}

/// Side and offset within the side for the rectangle parametrization
/// starting at (l, -h), counterclockwise.
pub fn rect_side(s: f64, l: f64, h: f64) -> (RectSide, f64) {
    let s1 = 2.0 * h; // end of right side
    let s2 = s1 + 2.0 * l; // end of top
    let s3 = s2 + 2.0 * h; // end of left
    if s < s1 {
        (RectSide::Right, s)
    } else if s < s2 {
        (RectSide::Top, s - s1)
    } else if s < s3 {
        (RectSide::Left, s - s2)
    } else {
        (RectSide::Bottom, s - s3)
    }
}

fn superellipse_point(phi: f64, p: f64, scale: f64) -> Point {
    let c = phi.cos();
    let s = phi.sin();
    let x = c.signum() * c.abs().powf(2.0 / p) * scale;
    let y = s.signum() * s.abs().powf(2.0 / p) * scale;
    Point::new(x, y)
}

fn superellipse_normal(pt: Point, p: f64, scale: f64) -> Vec2 {
    let gx = p * (pt.x / scale).abs().powf(p - 1.0) * (pt.x).signum();
    let gy = p * (pt.y / scale).abs().powf(p - 1.0) * (pt.y).signum();
    Point::new(gx, gy).normalized()
}

/// An arc of a parent boundary, traversed positively from `s_start` to
/// `s_end` (mod total length). Local coordinates sigma in [0, length].
#[derive(Debug, Clone)]
pub struct BoundaryArc {
    pub parent: Arc<ConvexBoundary>,
    pub s_start: f64,
    pub s_end: f64,
    length: f64,
}

impl BoundaryArc {
    pub fn new(parent: Arc<ConvexBoundary>, s_start: f64, s_end: f64) -> Result<Self, GeometryError> {
        let s_start = parent.wrap(s_start);
        let s_end = parent.wrap(s_end);
        let mut length = s_end - s_start;
        if length <= 0.0 {
            length += parent.total_length();
        }
        if length <= parent.param_tol() {
            return Err(GeometryError::EmptyArc);
        }
        Ok(BoundaryArc { parent, s_start, s_end, length })
    }

    /// The whole closed boundary as a single "arc" (sigma in [0, L)).
    pub fn full(parent: Arc<ConvexBoundary>) -> Self {
        let length = parent.total_length();
        BoundaryArc { parent, s_start: 0.0, s_end: 0.0, length }
    }

    pub fn is_full(&self) -> bool {
        (self.length - self.parent.total_length()).abs() <= self.parent.param_tol()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Global boundary parameter of local coordinate sigma.
    pub fn global(&self, sigma: f64) -> f64 {
        self.parent.wrap(self.s_start + sigma)
    }

    /// Local coordinate of a global parameter, if it lies on the arc
    /// (within parameter tolerance).
    pub fn local(&self, s: f64) -> Option<f64> {
        let tol = self.parent.param_tol();
        let mut d = self.parent.wrap(s) - self.s_start;
        if d < -tol {
            d += self.parent.total_length();
        }
        if d <= self.length + tol {
            Some(d.clamp(0.0, self.length))
        } else {
            None
        }
    }

    pub fn point_at(&self, sigma: f64) -> Point {
        self.parent.point_at(self.global(sigma))
    }

    pub fn tangent_at(&self, sigma: f64) -> Vec2 {
        self.parent.tangent_at(self.global(sigma))
    }

    pub fn endpoint_a(&self) -> Point {
        self.point_at(0.0)
    }

    pub fn endpoint_b(&self) -> Point {
        self.point_at(self.length)
    }

    /// The complementary arc sharing endpoints a and b.
    pub fn complement(&self) -> BoundaryArc {
        let length = self.parent.total_length() - self.length;
        BoundaryArc {
            parent: self.parent.clone(),
            s_start: self.s_end,
            s_end: self.s_start,
            length,
        }
    }

    pub fn is_complement_of(&self, other: &BoundaryArc) -> bool {
        let tol = self.parent.param_tol();
        (self.s_start - other.s_end).abs() <= tol && (self.s_end - other.s_start).abs() <= tol
    }
}

/// Parameter of a nearest boundary point to `p`. Deterministic tie-break:
/// smallest parameter.
pub fn project_to_boundary(boundary: &ConvexBoundary, p: Point) -> f64 {
    boundary.project(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_param_frame() {
        let c = ConvexBoundary::circle(1.0);
        let p = c.point_at(0.0);
        assert!((p.x - 1.0).abs() < 1e-15 && p.y.abs() < 1e-15);
        let t = c.tangent_at(0.0);
        let n = c.outward_normal_at(0.0);
        // positively oriented (nu, tau): det [n t] > 0
        assert!(n.cross(t) > 0.99);
        assert!((t.x - 0.0).abs() < 1e-15 && (t.y - 1.0).abs() < 1e-15);
        assert!((n.x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn circle_projection_examples() {
        let c = ConvexBoundary::circle(1.0);
        let s = project_to_boundary(&c, Point::new(2.0, 0.0));
        let p = c.point_at(s);
        assert!(p.dist(Point::new(1.0, 0.0)) < 1e-12);
        // center: all points equidistant, tie-break smallest s
        assert_eq!(project_to_boundary(&c, Point::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn rectangle_projection_example() {
        let r = ConvexBoundary::rectangle(1.0, 1.0);
        let s = project_to_boundary(&r, Point::new(0.5, 2.0));
        let p = r.point_at(s);
        assert!(p.dist(Point::new(0.5, 1.0)) < 1e-12, "got {:?}", p);
    }

    #[test]
    fn rectangle_walkaround() {
        let r = ConvexBoundary::rectangle(2.0, 1.0);
        assert_eq!(r.total_length(), 12.0);
        assert!(r.point_at(0.0).dist(Point::new(2.0, -1.0)) < 1e-12);
        assert!(r.point_at(2.0).dist(Point::new(2.0, 1.0)) < 1e-12);
        assert!(r.point_at(6.0).dist(Point::new(-2.0, 1.0)) < 1e-12);
        assert!(r.point_at(8.0).dist(Point::new(-2.0, -1.0)) < 1e-12);
        // closes up
        assert!(r.point_at(12.0).dist(r.point_at(0.0)) < 1e-12);
    }

    #[test]
    fn superellipse_on_curve_and_normal() {
        let e = ConvexBoundary::superellipse(4.0, 1.0);
        assert!(e.strictly_convex());
        for k in 0..64 {
            let s = e.total_length() * (k as f64) / 64.0;
            let p = e.point_at(s);
            let v = p.x.abs().powi(4) + p.y.abs().powi(4);
            assert!((v - 1.0).abs() < 1e-6, "off-curve: {v}");
            let n = e.outward_normal_at(s);
            let t = e.tangent_at(s);
            assert!(n.cross(t) > 0.9);
        }
    }

    #[test]
    fn arc_local_global_roundtrip_with_wrap() {
        let c = ConvexBoundary::circle(1.0);
        // arc crossing s = 0
        let arc = BoundaryArc::new(c.clone(), 7.0 * std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4).unwrap();
        assert!((arc.length() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let sigma = 0.3;
        let s = arc.global(sigma);
        assert!((arc.local(s).unwrap() - sigma).abs() < 1e-12);
        assert!(arc.local(std::f64::consts::PI).is_none());
        let comp = arc.complement();
        assert!(comp.is_complement_of(&arc));
        assert!((comp.length() + arc.length() - c.total_length()).abs() < 1e-12);
    }

    #[test]
    fn polyline_convexity_check() {
        // three collinear samples: convex but not strictly
        let flat = ConvexBoundary::polyline(vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        assert!(!flat.strictly_convex());
        let bad = ConvexBoundary::polyline(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.2, 0.2),
            Point::new(0.0, 1.0),
        ]);
        assert!(bad.is_err());
    }
}
