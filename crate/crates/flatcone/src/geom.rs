//! Plane geometry primitives shared by every module.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::rotation::RationalAngle;

/// Default geometric tolerance (length units) for edge matching and
/// point-on-edge tests.
pub const EPS_GEOM: f64 = 1e-9;
/// Default angular tolerance (radians) for inexact fallbacks.
pub const EPS_ANGLE: f64 = 1e-9;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// A point (or vector) in a polygon chart's local Euclidean coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        PlanePoint { x, y }
    }

    pub const ZERO: PlanePoint = PlanePoint { x: 0.0, y: 0.0 };

    pub fn dot(self, other: PlanePoint) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: PlanePoint) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: PlanePoint) -> f64 {
        (self - other).norm()
    }

    pub fn unit(self) -> PlanePoint {
        let n = self.norm();
        PlanePoint::new(self.x / n, self.y / n)
    }

    /// Angle in `[0, 2 pi)`.
    pub fn angle(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + TWO_PI
        } else {
            a
        }
    }

    pub fn from_angle(a: f64) -> PlanePoint {
        PlanePoint::new(a.cos(), a.sin())
    }

    /// Rotate by the rotation with the given cosine/sine.
    pub fn rotate(self, cos: f64, sin: f64) -> PlanePoint {
        PlanePoint::new(cos * self.x - sin * self.y, sin * self.x + cos * self.y)
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> PlanePoint {
        PlanePoint::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for PlanePoint {
    type Output = PlanePoint;
    fn add(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for PlanePoint {
    type Output = PlanePoint;
    fn sub(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for PlanePoint {
    type Output = PlanePoint;
    fn neg(self) -> PlanePoint {
        PlanePoint::new(-self.x, -self.y)
    }
}

impl Mul<f64> for PlanePoint {
    type Output = PlanePoint;
    fn mul(self, s: f64) -> PlanePoint {
        PlanePoint::new(self.x * s, self.y * s)
    }
}

impl Serialize for PlanePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.x, self.y).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlanePoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (x, y) = <(f64, f64)>::deserialize(d)?;
        Ok(PlanePoint::new(x, y))
    }
}

/// An orientation-preserving plane isometry `z -> R(rot) z + t`, with the
/// rotation tracked exactly as a rational multiple of pi.
#[derive(Debug, Clone, Copy)]
pub struct Isometry {
    pub rot: RationalAngle,
    cos: f64,
    sin: f64,
    pub t: PlanePoint,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            rot: RationalAngle::zero(),
            cos: 1.0,
            sin: 0.0,
            t: PlanePoint::ZERO,
        }
    }

    pub fn new(rot: RationalAngle, t: PlanePoint) -> Self {
        let (cos, sin) = rot.mod_two_pi().cos_sin();
        Isometry { rot, cos, sin, t }
    }

    pub fn translation(t: PlanePoint) -> Self {
        Isometry::new(RationalAngle::zero(), t)
    }

    pub fn apply(&self, p: PlanePoint) -> PlanePoint {
        p.rotate(self.cos, self.sin) + self.t
    }

    pub fn apply_dir(&self, d: PlanePoint) -> PlanePoint {
        d.rotate(self.cos, self.sin)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry::new(self.rot + other.rot, self.apply(other.t))
    }

    pub fn inverse(&self) -> Isometry {
        let r = -self.rot;
        let inv = Isometry::new(r, PlanePoint::ZERO);
        let t = inv.apply(self.t);
        Isometry::new(r, -t)
    }

    pub fn is_identity(&self, eps: f64) -> bool {
        self.rot.mod_two_pi().is_zero() && self.t.norm() <= eps
    }
}

/// Counterclockwise angle swept from direction `a` to direction `b`,
/// in `[0, 2 pi)`.
pub fn ccw_angle(a: PlanePoint, b: PlanePoint) -> f64 {
    let d = b.angle() - a.angle();
    if d < 0.0 {
        d + TWO_PI
    } else {
        d
    }
}

/// Twice the signed area of the polygon (positive for counterclockwise).
pub fn polygon_signed_area2(vertices: &[PlanePoint]) -> f64 {
    let n = vertices.len();
    let mut s = 0.0;
    for i in 0..n {
        s += vertices[i].cross(vertices[(i + 1) % n]);
    }
    s
}

/// Point-in-polygon by crossing number; points within `eps` of the boundary
/// count as inside.
pub fn point_in_polygon(vertices: &[PlanePoint], p: PlanePoint, eps: f64) -> bool {
    let n = vertices.len();
    for i in 0..n {
        if dist_point_segment(p, vertices[i], vertices[(i + 1) % n]) <= eps {
            return true;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let xl = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < xl {
                inside = !inside;
            }
        }
    }
    inside
}

pub fn dist_point_segment(p: PlanePoint, a: PlanePoint, b: PlanePoint) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_sq();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Proper or touching intersection test for closed segments.
pub fn segments_intersect(a: PlanePoint, b: PlanePoint, c: PlanePoint, d: PlanePoint) -> bool {
    fn orient(p: PlanePoint, q: PlanePoint, r: PlanePoint) -> f64 {
        (q - p).cross(r - p)
    }
    fn on_seg(p: PlanePoint, q: PlanePoint, r: PlanePoint) -> bool {
        q.x >= p.x.min(r.x) && q.x <= p.x.max(r.x) && q.y >= p.y.min(r.y) && q.y <= p.y.max(r.y)
    }
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_seg(a, c, b))
        || (d2 == 0.0 && on_seg(a, d, b))
        || (d3 == 0.0 && on_seg(c, a, d))
        || (d4 == 0.0 && on_seg(c, b, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isometry_compose_and_inverse() {
        let g = Isometry::new(RationalAngle::new(1, 2), PlanePoint::new(3.0, -1.0));
        let h = Isometry::new(RationalAngle::new(2, 3), PlanePoint::new(0.5, 2.0));
        let p = PlanePoint::new(1.25, -0.75);
        let via_compose = g.compose(&h).apply(p);
        let direct = g.apply(h.apply(p));
        assert!(via_compose.dist(direct) < 1e-12);
        let id = g.compose(&g.inverse());
        assert!(id.is_identity(1e-12));
        assert!(g.inverse().apply(g.apply(p)).dist(p) < 1e-12);
    }

    #[test]
    fn ccw_angle_quadrants() {
        let e = PlanePoint::new(1.0, 0.0);
        assert!((ccw_angle(e, PlanePoint::new(0.0, 1.0)) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((ccw_angle(e, PlanePoint::new(0.0, -1.0)) - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn point_in_square() {
        let sq = [
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(1.0, 0.0),
            PlanePoint::new(1.0, 1.0),
            PlanePoint::new(0.0, 1.0),
        ];
        assert!(point_in_polygon(&sq, PlanePoint::new(0.5, 0.5), 1e-9));
        assert!(point_in_polygon(&sq, PlanePoint::new(0.0, 0.5), 1e-9));
        assert!(!point_in_polygon(&sq, PlanePoint::new(1.5, 0.5), 1e-9));
    }
}
