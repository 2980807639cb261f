//! Internal triangulated shadow of a surface.
//!
//! Charts are ear-clipped into triangles glued along their diagonals by
//! identity isometries; original gluings carry over unchanged. Corridors
//! over the shadow surface consist of convex pieces, which makes taut-path
//! computations a matter of portal-to-portal optimization, and the shadow's
//! vertex classes expose the full sector fans needed for corridor pivots.

use std::collections::HashMap;

use crate::geom::PlanePoint;
use crate::surface::{
    BuildOptions, Crossing, EdgeGluing, EdgeRef, FlatConeSurface, PolygonChart, SurfaceError,
};

pub struct TriangulatedSurface {
    pub surface: FlatConeSurface,
    /// Original `(chart, edge)` -> shadow `(triangle chart, edge)`.
    pub boundary: HashMap<(usize, usize), (usize, usize)>,
    /// Original gluing index -> shadow gluing index.
    pub gluing_map: Vec<usize>,
    /// Shadow triangle chart -> diagonal crossings `(crossing, neighbor)`.
    diag_adj: HashMap<usize, Vec<(Crossing, usize)>>,
}

#[derive(Debug, thiserror::Error)]
pub enum TriangulateError {
    #[error("chart {0} could not be triangulated")]
    EarClipFailed(i64),
    #[error("triangulated surface failed to rebuild: {0}")]
    Rebuild(#[from] SurfaceError),
}

impl TriangulatedSurface {
    pub fn new(surface: &FlatConeSurface) -> Result<TriangulatedSurface, TriangulateError> {
        let mut tri_charts: Vec<PolygonChart> = Vec::new();
        let mut boundary = HashMap::new();
        // Diagonal {chart, lo vertex, hi vertex} -> the two triangle edges.
        let mut diagonals: HashMap<(usize, usize, usize), Vec<(usize, usize)>> = HashMap::new();

        for ci in 0..surface.chart_count() {
            let verts = surface.chart_vertices(ci);
            let n = verts.len();
            let tris = ear_clip(verts)
                .ok_or_else(|| TriangulateError::EarClipFailed(surface.chart_id(ci)))?;
            for tri in tris {
                let tci = tri_charts.len();
                tri_charts.push(PolygonChart::new(
                    tci as i64,
                    tri.iter().map(|&v| verts[v]).collect(),
                ));
                for e in 0..3 {
                    let a = tri[e];
                    let b = tri[(e + 1) % 3];
                    if (a + 1) % n == b {
                        boundary.insert((ci, a), (tci, e));
                    } else {
                        diagonals
                            .entry((ci, a.min(b), a.max(b)))
                            .or_default()
                            .push((tci, e));
                    }
                }
            }
        }

        let mut gluings = Vec::new();
        let mut gluing_map = Vec::new();
        for g in surface.gluings() {
            let from = boundary[&g.from];
            let to = boundary[&g.to];
            gluing_map.push(gluings.len());
            gluings.push(EdgeGluing {
                from: EdgeRef::new(from.0 as i64, from.1),
                to: EdgeRef::new(to.0 as i64, to.1),
                rotation: g.rotation,
                translation: Some(g.iso.t),
            });
        }
        let mut diag_gluings = Vec::new();
        let mut diag_keys: Vec<(usize, usize, usize)> = diagonals.keys().copied().collect();
        diag_keys.sort();
        for key in diag_keys {
            let sides = &diagonals[&key];
            debug_assert_eq!(sides.len(), 2, "each diagonal belongs to two triangles");
            let gi = gluings.len();
            gluings.push(EdgeGluing {
                from: EdgeRef::new(sides[0].0 as i64, sides[0].1),
                to: EdgeRef::new(sides[1].0 as i64, sides[1].1),
                rotation: crate::rotation::RotationClass::zero(),
                translation: Some(PlanePoint::ZERO),
            });
            diag_gluings.push((gi, sides[0].0, sides[1].0));
        }

        let options = BuildOptions {
            epsilon: surface.epsilon(),
            keep_marked_points: true,
            allow_angle_below_two_pi: surface.options().allow_angle_below_two_pi,
        };
        let shadow = FlatConeSurface::build(tri_charts, gluings, options)?;

        let mut diag_adj: HashMap<usize, Vec<(Crossing, usize)>> = HashMap::new();
        for (gi, t0, t1) in diag_gluings {
            diag_adj
                .entry(t0)
                .or_default()
                .push((Crossing::new(gi, true), t1));
            diag_adj
                .entry(t1)
                .or_default()
                .push((Crossing::new(gi, false), t0));
        }

        Ok(TriangulatedSurface {
            surface: shadow,
            boundary,
            gluing_map,
            diag_adj,
        })
    }

    /// Diagonal crossings leading from the triangle holding `from_edge` to
    /// the triangle holding `to_edge` within one original chart. The dual
    /// graph of a polygon triangulation is a tree, so the route is unique.
    pub fn route(&self, from: (usize, usize), to: (usize, usize)) -> Vec<Crossing> {
        let start = from.0;
        let goal = to.0;
        if start == goal {
            return Vec::new();
        }
        let mut stack = vec![(start, usize::MAX, Vec::new())];
        while let Some((tri, parent, path)) = stack.pop() {
            if tri == goal {
                return path;
            }
            if let Some(adj) = self.diag_adj.get(&tri) {
                for &(crossing, next) in adj {
                    if next != parent {
                        let mut p = path.clone();
                        p.push(crossing);
                        stack.push((next, tri, p));
                    }
                }
            }
        }
        unreachable!("triangulation dual graph is connected within a chart");
    }
}

/// Ear-clipping triangulation of a simple counterclockwise polygon; handles
/// collinear (straight-angle) vertices by never clipping a degenerate ear.
fn ear_clip(pts: &[PlanePoint]) -> Option<Vec<[usize; 3]>> {
    let n = pts.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tris = Vec::new();
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let a = idx[(k + m - 1) % m];
            let b = idx[k];
            let c = idx[(k + 1) % m];
            let cr = (pts[b] - pts[a]).cross(pts[c] - pts[b]);
            if cr <= 1e-12 {
                continue; // reflex or straight corner
            }
            let blocked = idx.iter().any(|&j| {
                j != a && j != b && j != c && point_in_triangle(pts[j], pts[a], pts[b], pts[c])
            });
            if !blocked {
                tris.push([a, b, c]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            return None;
        }
    }
    let [a, b, c] = [idx[0], idx[1], idx[2]];
    if (pts[b] - pts[a]).cross(pts[c] - pts[b]) <= 1e-12 {
        return None;
    }
    tris.push([a, b, c]);
    Some(tris)
}

/// Closed containment with a small tolerance: points on the boundary block
/// an ear (a diagonal may not pass through a vertex).
fn point_in_triangle(p: PlanePoint, a: PlanePoint, b: PlanePoint, c: PlanePoint) -> bool {
    let tol = 1e-12;
    let d1 = (b - a).cross(p - a);
    let d2 = (c - b).cross(p - b);
    let d3 = (a - c).cross(p - c);
    d1 >= -tol && d2 >= -tol && d3 >= -tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use num_rational::Ratio;

    #[test]
    fn ear_clip_square_and_l() {
        let sq: Vec<PlanePoint> = vec![
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(1.0, 0.0),
            PlanePoint::new(1.0, 1.0),
            PlanePoint::new(0.0, 1.0),
        ];
        assert_eq!(ear_clip(&sq).unwrap().len(), 2);
        let (l, _) = fixtures::l_shape();
        let tris = ear_clip(&l[0].vertices).unwrap();
        assert_eq!(tris.len(), 6);
        let area: f64 = tris
            .iter()
            .map(|t| {
                let (a, b, c) = (l[0].vertices[t[0]], l[0].vertices[t[1]], l[0].vertices[t[2]]);
                0.5 * (b - a).cross(c - a)
            })
            .sum();
        assert!((area - 3.0).abs() < 1e-12);
    }

    #[test]
    fn shadow_surfaces_keep_classes_and_topology() {
        for s in [
            fixtures::build_torus(),
            fixtures::build_octagon(),
            fixtures::build_l_shape(),
            fixtures::build_half_translation(),
            fixtures::build_bad_angle(),
        ] {
            let t = TriangulatedSurface::new(&s).unwrap();
            assert_eq!(t.surface.euler_characteristic(), s.euler_characteristic());
            assert_eq!(t.surface.genus(), s.genus());
            let mut orig: Vec<Ratio<i64>> =
                s.cone_angles().iter().map(|(_, a)| a.ratio()).collect();
            let mut shadow: Vec<Ratio<i64>> =
                t.surface.cone_angles().iter().map(|(_, a)| a.ratio()).collect();
            orig.sort();
            shadow.sort();
            assert_eq!(orig, shadow);
        }
    }

    #[test]
    fn routes_stay_inside_one_chart() {
        let s = fixtures::build_octagon();
        let t = TriangulatedSurface::new(&s).unwrap();
        let from = t.boundary[&(0, 0)];
        let to = t.boundary[&(0, 4)];
        let route = t.route(from, to);
        for c in &route {
            assert!(c.gluing >= t.gluing_map.len());
        }
        let mut at = from.0;
        for c in &route {
            assert_eq!(t.surface.crossing_source(*c), at);
            at = t.surface.crossing_target(*c);
        }
        assert_eq!(at, to.0);
    }
}
