//! Planar geometry helpers shared by the planners.
//!
//! All coordinates are horizontal ground-plane positions in meters.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Slack (meters) added to the closed-disk test `‖q − w‖ ≤ D`.
///
/// Candidate points built from circle intersections sit on the boundary up to
/// rounding; the slack keeps them inside.
pub const CONNECT_TOL: f64 = 1e-9;

/// A point (or vector) in the horizontal plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Linear interpolation, `t = 0` gives `self`.
    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    /// Whether `self` lies in the closed disk of radius `radius` around `center`.
    pub fn within(self, center: Point, radius: f64) -> bool {
        self.dist(center) <= radius + CONNECT_TOL
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    /// Returns `None` for an empty slice.
    pub fn of(points: &[Point]) -> Option<Self> {
        let first = *points.first()?;
        let mut bb = BoundingBox { min: first, max: first };
        for p in &points[1..] {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }
}

pub fn centroid(points: &[Point]) -> Point {
    let n = points.len().max(1) as f64;
    let sum = points.iter().fold(Point::default(), |acc, &p| acc + p);
    sum * (1.0 / n)
}

/// Total length of the polyline through `points`.
pub fn polyline_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Indices of the convex hull vertices in counter-clockwise order
/// (Andrew's monotone chain). Collinear boundary points are dropped;
/// duplicate points contribute a single index.
pub fn convex_hull(points: &[Point]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        let (pa, pb) = (points[a], points[b]);
        pa.x.total_cmp(&pb.x).then(pa.y.total_cmp(&pb.y)).then(a.cmp(&b))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }

    let turn = |o: usize, a: usize, b: usize| (points[a] - points[o]).cross(points[b] - points[o]);
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for &i in &idx {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], i) <= 0.0 {
            hull.pop();
        }
        hull.push(i);
    }
    let lower_len = hull.len() + 1;
    for &i in idx.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], i) <= 0.0 {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

/// Intersection points of two circles of equal radius `r`.
///
/// Returns an empty vector when the circles are disjoint or concentric, and a
/// single point when they are tangent (up to rounding).
pub fn circle_intersections(c1: Point, c2: Point, r: f64) -> Vec<Point> {
    let d = c1.dist(c2);
    if d == 0.0 || d > 2.0 * r + CONNECT_TOL {
        return Vec::new();
    }
    let mid = c1.lerp(c2, 0.5);
    let h_sq = r * r - 0.25 * d * d;
    if h_sq <= 0.0 {
        return vec![mid];
    }
    let h = h_sq.sqrt();
    let u = (c2 - c1) * (1.0 / d);
    let perp = Point::new(-u.y, u.x);
    vec![mid + perp * h, mid - perp * h]
}

/// Smallest circle containing all `points`, as `(center, radius)`.
///
/// Incremental construction (Welzl's method without shuffling); worst case
/// cubic, which is fine for cluster-sized inputs. Empty input gives the
/// origin with radius 0.
pub fn min_enclosing_circle(points: &[Point]) -> (Point, f64) {
    let Some(&first) = points.first() else {
        return (Point::default(), 0.0);
    };
    let inside = |c: Point, r: f64, p: Point| p.dist(c) <= r * (1.0 + 1e-12) + 1e-12;
    let (mut c, mut r) = (first, 0.0);
    for i in 1..points.len() {
        if inside(c, r, points[i]) {
            continue;
        }
        (c, r) = (points[i], 0.0);
        for j in 0..i {
            if inside(c, r, points[j]) {
                continue;
            }
            c = points[i].lerp(points[j], 0.5);
            r = c.dist(points[i]);
            for k in 0..j {
                if !inside(c, r, points[k]) {
                    (c, r) = circle_through(points[i], points[j], points[k]);
                }
            }
        }
    }
    (c, r)
}

/// Circumcircle of three points; for (nearly) collinear points, the circle
/// on their farthest pair.
fn circle_through(a: Point, b: Point, c: Point) -> (Point, f64) {
    let (ab, ac) = (b - a, c - a);
    let det = 2.0 * ab.cross(ac);
    let scale = ab.norm_sq().max(ac.norm_sq());
    if det.abs() <= 1e-12 * scale {
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs.into_iter().max_by(|x, y| x.0.dist(x.1).total_cmp(&y.0.dist(y.1))).unwrap_or((a, b));
        let m = p.lerp(q, 0.5);
        return (m, m.dist(p));
    }
    let ux = (ac.y * ab.norm_sq() - ab.y * ac.norm_sq()) / det;
    let uy = (ab.x * ac.norm_sq() - ac.x * ab.norm_sq()) / det;
    let center = a + Point::new(ux, uy);
    (center, center.dist(a).max(center.dist(b)).max(center.dist(c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enclosing_circle_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.random_range(1..=9);
            let pts: Vec<Point> =
                (0..n).map(|_| Point::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0))).collect();
            let (c, r) = min_enclosing_circle(&pts);
            assert!(pts.iter().all(|p| p.dist(c) <= r + 1e-9));
            // the optimum is a circle on two or three of the points
            let mut best = if n == 1 { 0.0 } else { f64::INFINITY };
            let covers = |c: Point, r: f64| pts.iter().all(|p| p.dist(c) <= r + 1e-9);
            for i in 0..n {
                for j in i + 1..n {
                    let m = pts[i].lerp(pts[j], 0.5);
                    if covers(m, m.dist(pts[i])) {
                        best = f64::min(best, m.dist(pts[i]));
                    }
                    for k in j + 1..n {
                        let (cc, rr) = circle_through(pts[i], pts[j], pts[k]);
                        if covers(cc, rr) {
                            best = best.min(rr);
                        }
                    }
                }
            }
            assert!((r - best).abs() <= 1e-9 * best.max(1.0), "{r} vs {best}");
        }
    }

    #[test]
    fn enclosing_circle_small_cases() {
        assert_eq!(min_enclosing_circle(&[]), (Point::default(), 0.0));
        let (c, r) = min_enclosing_circle(&[Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(2.0, 0.0)]);
        assert_eq!((c, r), (Point::new(2.0, 0.0), 2.0));
    }

    #[test]
    fn hull_of_square_with_interior_point() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 0.5),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let mut hull = convex_hull(&pts);
        hull.sort_unstable();
        assert_eq!(hull, vec![0, 1, 3, 4]);
    }

    #[test]
    fn hull_degenerate_inputs() {
        assert!(convex_hull(&[]).is_empty());
        assert_eq!(convex_hull(&[Point::new(1.0, 1.0)]), vec![0]);
        let dup = [Point::new(1.0, 1.0), Point::new(1.0, 1.0)];
        assert_eq!(convex_hull(&dup).len(), 1);
    }

    #[test]
    fn equal_circles_intersect_symmetrically() {
        let pts = circle_intersections(Point::new(0.0, 0.0), Point::new(6.0, 0.0), 5.0);
        assert_eq!(pts.len(), 2);
        for p in pts {
            assert!((p.x - 3.0).abs() < 1e-12);
            assert!((p.y.abs() - 4.0).abs() < 1e-12);
        }
        let tangent = circle_intersections(Point::new(0.0, 0.0), Point::new(10.0, 0.0), 5.0);
        assert_eq!(tangent, vec![Point::new(5.0, 0.0)]);
        assert!(circle_intersections(Point::new(0.0, 0.0), Point::new(11.0, 0.0), 5.0).is_empty());
    }
}
