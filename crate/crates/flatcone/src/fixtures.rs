//! Bundled example surfaces.
//!
//! These are the same surfaces shipped as JSON fixture files; the builders
//! here are the source of truth and the files are generated from them.

use crate::geom::PlanePoint;
use crate::rotation::RotationClass;
use crate::surface::{BuildOptions, EdgeGluing, EdgeRef, FlatConeSurface, PolygonChart};

fn pt(x: f64, y: f64) -> PlanePoint {
    PlanePoint::new(x, y)
}

fn glue(from: (i64, usize), to: (i64, usize), rot: RotationClass) -> EdgeGluing {
    EdgeGluing::new(EdgeRef::new(from.0, from.1), EdgeRef::new(to.0, to.1), rot)
}

/// Unit-square flat torus: opposite sides glued by translation.
/// One vertex class of angle 2 pi, chi = 0, genus 1.
pub fn torus() -> (Vec<PolygonChart>, Vec<EdgeGluing>) {
    let square = PolygonChart::new(
        0,
        vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)],
    );
    let gluings = vec![
        glue((0, 0), (0, 2), RotationClass::zero()),
        glue((0, 1), (0, 3), RotationClass::zero()),
    ];
    (vec![square], gluings)
}

/// Rectangular torus of the given side lengths.
pub fn rect_torus(width: f64, height: f64) -> (Vec<PolygonChart>, Vec<EdgeGluing>) {
    let rect = PolygonChart::new(
        0,
        vec![pt(0.0, 0.0), pt(width, 0.0), pt(width, height), pt(0.0, height)],
    );
    let gluings = vec![
        glue((0, 0), (0, 2), RotationClass::zero()),
        glue((0, 1), (0, 3), RotationClass::zero()),
    ];
    (vec![rect], gluings)
}

/// Regular octagon with opposite sides glued by translation: genus 2 with a
/// single cone point of angle 6 pi.
pub fn octagon() -> (Vec<PolygonChart>, Vec<EdgeGluing>) {
    octagon_scaled(1.0)
}

/// Regular octagon of side `s`, opposite sides glued by translation.
pub fn octagon_scaled(s: f64) -> (Vec<PolygonChart>, Vec<EdgeGluing>) {
    let circumradius = s / (2.0 * (std::f64::consts::PI / 8.0).sin());
    let vertices = (0..8)
        .map(|k| {
            let a = (2.0 * k as f64 + 1.0) * std::f64::consts::PI / 8.0;
            pt(circumradius * a.cos(), circumradius * a.sin())
        })
        .collect();
    let chart = PolygonChart::new(0, vertices);
    let gluings = (0..4)
        .map(|k| glue((0, k), (0, k + 4), RotationClass::zero()))
        .collect();
    (vec![chart], gluings)
}

/// L-shaped translation surface (three unit squares as one polygon, opposite
/// sides glued): genus 2 with a single cone point of angle 6 pi.
pub fn l_shape() -> (Vec<PolygonChart>, Vec<EdgeGluing>) {
    let chart = PolygonChart::new(
        0,
        vec![
            pt(0.0, 0.0),
            pt(1.0, 0.0),
            pt(2.0, 0.0),
            pt(2.0, 1.0),
            pt(1.0, 1.0),
            pt(1.0, 2.0),
            pt(0.0, 2.0),
            pt(0.0, 1.0),
        ],
    );
    let z = RotationClass::zero;
    let gluings = vec![
        glue((0, 0), (0, 5), z()),
        glue((0, 1), (0, 3), z()),
        glue((0, 2), (0, 7), z()),
        glue((0, 4), (0, 6), z()),
    ];
    (vec![chart], gluings)
}

/// Two unit squares glued by a pair of rotation-pi identifications along the
/// horizontal edges, plus translation wraps. Metrically a flat torus, but
/// presented with half-translation gluings; all cone angles are 2 pi.
pub fn half_translation() -> (Vec<PolygonChart>, Vec<EdgeGluing>) {
    let a = PolygonChart::new(
        0,
        vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)],
    );
    let b = PolygonChart::new(
        1,
        vec![pt(0.0, 1.0), pt(1.0, 1.0), pt(1.0, 2.0), pt(0.0, 2.0)],
    );
    let gluings = vec![
        glue((0, 0), (1, 0), RotationClass::pi()),
        glue((0, 2), (1, 2), RotationClass::pi()),
        glue((0, 1), (0, 3), RotationClass::zero()),
        glue((1, 1), (1, 3), RotationClass::zero()),
    ];
    (vec![a, b], gluings)
}

/// A ring of six quadrilateral sectors whose apexes are glued by
/// rotation-2pi/3 identifications (and whose outer corners by rotation-pi/2
/// ones). Valid and nonpositively curved, but the cone angles are
/// 4 pi, 3 pi, 5 pi/2, 5 pi/2 — the 5 pi/2 classes break the angle condition
/// and the pi/2 rotations break the holonomy condition.
pub fn bad_angle() -> (Vec<PolygonChart>, Vec<EdgeGluing>) {
    // Sector quad: apex angle 2 pi/3 at v0, 5 pi/12 at v1 and v3, pi/2 at v2.
    let v0 = pt(0.0, 0.0);
    let v1 = pt(1.0, 0.0);
    let l = (1.5f64).sqrt();
    let a105 = 105.0f64.to_radians();
    let v2 = pt(1.0 + l * a105.cos(), l * a105.sin());
    let v3 = pt(-0.5, 0.75f64.sqrt());
    let charts: Vec<PolygonChart> = (0..6)
        .map(|i| PolygonChart::new(i, vec![v0, v1, v2, v3]))
        .collect();
    let mut gluings = Vec::new();
    for i in 0..6i64 {
        let next = (i + 1) % 6;
        gluings.push(glue((next, 0), (i, 3), RotationClass::new(2, 3)));
        gluings.push(glue((next, 2), (i, 1), RotationClass::new(1, 2)));
    }
    (charts, gluings)
}

pub fn build_torus() -> FlatConeSurface {
    let (c, g) = torus();
    FlatConeSurface::build(c, g, BuildOptions::default()).expect("torus fixture")
}

/// Torus with the corner class retained as a marked point.
pub fn build_marked_torus() -> FlatConeSurface {
    let (c, g) = torus();
    FlatConeSurface::build(c, g, BuildOptions::with_marked_points()).expect("torus fixture")
}

pub fn build_octagon() -> FlatConeSurface {
    let (c, g) = octagon();
    FlatConeSurface::build(c, g, BuildOptions::default()).expect("octagon fixture")
}

pub fn build_octagon_scaled(s: f64) -> FlatConeSurface {
    let (c, g) = octagon_scaled(s);
    FlatConeSurface::build(c, g, BuildOptions::default()).expect("octagon fixture")
}

pub fn build_l_shape() -> FlatConeSurface {
    let (c, g) = l_shape();
    FlatConeSurface::build(c, g, BuildOptions::default()).expect("l_shape fixture")
}

pub fn build_half_translation() -> FlatConeSurface {
    let (c, g) = half_translation();
    FlatConeSurface::build(c, g, BuildOptions::default()).expect("halftrans fixture")
}

pub fn build_bad_angle() -> FlatConeSurface {
    let (c, g) = bad_angle();
    FlatConeSurface::build(c, g, BuildOptions::default()).expect("badangle fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn torus_is_flat_genus_one() {
        let s = build_torus();
        assert_eq!(s.euler_characteristic(), 0);
        assert_eq!(s.genus(), 1);
        assert!(s.cone_points().is_empty());
        assert_eq!(s.vertex_classes().len(), 1);
        assert!(s.vertex_classes()[0].is_flat());
    }

    #[test]
    fn octagon_has_one_six_pi_cone() {
        let s = build_octagon();
        assert_eq!(s.euler_characteristic(), -2);
        assert_eq!(s.genus(), 2);
        let angles = s.cone_angles();
        assert_eq!(angles.len(), 1);
        assert_eq!(angles[0].1.ratio(), Ratio::from_integer(6));
    }

    #[test]
    fn l_shape_has_one_six_pi_cone() {
        let s = build_l_shape();
        assert_eq!(s.genus(), 2);
        let angles = s.cone_angles();
        assert_eq!(angles.len(), 1);
        assert_eq!(angles[0].1.ratio(), Ratio::from_integer(6));
        // All eight corners belong to the single class.
        assert_eq!(s.vertex_classes().len(), 1);
        assert_eq!(s.vertex_classes()[0].corners.len(), 8);
    }

    #[test]
    fn half_translation_is_flat() {
        let s = build_half_translation();
        assert_eq!(s.euler_characteristic(), 0);
        assert_eq!(s.genus(), 1);
        assert!(s.cone_angles().is_empty());
        assert_eq!(s.vertex_classes().len(), 2);
        for vc in s.vertex_classes() {
            assert!(vc.is_flat());
            assert_eq!(vc.corners.len(), 4);
        }
    }

    #[test]
    fn bad_angle_cone_spectrum() {
        let s = build_bad_angle();
        assert_eq!(s.euler_characteristic(), -2);
        assert_eq!(s.genus(), 2);
        let mut ratios: Vec<Ratio<i64>> = s.cone_angles().iter().map(|(_, a)| a.ratio()).collect();
        ratios.sort();
        assert_eq!(
            ratios,
            vec![
                Ratio::new(5, 2),
                Ratio::new(5, 2),
                Ratio::from_integer(3),
                Ratio::from_integer(4),
            ]
        );
    }
}
