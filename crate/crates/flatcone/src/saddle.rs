//! Saddle-connection enumeration by breadth-first corridor unfolding.
//!
//! From every corner of every cone point the chart chain is developed into
//! the plane with the cone point at the origin. A corridor keeps the
//! angular window of directions that still see its entry edge; a developed
//! vertex of a cone class inside the window and the length bound is a
//! candidate connection. Windows only over-approximate visibility (charts
//! may be non-convex), so every candidate is verified by re-tracing before
//! it is accepted; connections running along glued edges (possibly through
//! dropped flat vertices) are picked up by tracing the boundary rays
//! directly.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::geodesic::{trace, DirectedPoint, Terminal, TraceError};
use crate::geom::{dist_point_segment, Isometry, PlanePoint};
use crate::surface::{Crossing, FlatConeSurface};

/// A geodesic segment between cone points with no cone point in its
/// interior. The displacement is the developed vector in the chart of the
/// departure corner; orientation is normalized up to reversal.
#[derive(Debug, Clone, Serialize)]
pub struct SaddleConnection {
    pub start_cone: usize,
    pub end_cone: usize,
    pub displacement: PlanePoint,
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct SaddleOptions {
    /// Abort when the number of expanded corridors exceeds this cap.
    pub corridor_cap: usize,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        SaddleOptions {
            corridor_cap: 1_000_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum SaddleError {
    #[error("length bound must be positive, got {0}")]
    BadBound(f64),
    #[error("surface has no cone points or retained marked points")]
    NoConePoints,
    #[error(
        "corridor explosion: more than {cap} corridors within length bound {bound} \
         (raise the cap or lower the bound)"
    )]
    Explosion { cap: usize, bound: f64 },
}

/// Enumerate every saddle connection of length at most `bound`, one entry
/// per connection up to orientation reversal, sorted by length then
/// direction angle. Deterministic.
pub fn enumerate_saddle_connections(
    surface: &FlatConeSurface,
    bound: f64,
    options: &SaddleOptions,
) -> Result<Vec<SaddleConnection>, SaddleError> {
    if !bound.is_finite() || bound <= 0.0 {
        return Err(SaddleError::BadBound(bound));
    }
    if surface.cone_points().is_empty() {
        return Err(SaddleError::NoConePoints);
    }
    let mut found: BTreeMap<CanonicalKey, SaddleConnection> = BTreeMap::new();
    let mut corridors_used = 0usize;

    for cone in surface.cone_points() {
        let class = surface.class(cone.class);
        for (k, &(chart, vertex)) in class.corners.iter().enumerate() {
            let origin = surface.vertex(chart, vertex);
            let base = class.base_angle[k];
            let alpha = class.interior[k];

            // Boundary rays: connections running along glued edges, possibly
            // straight through dropped flat vertices.
            for dir in [
                PlanePoint::from_angle(base),
                PlanePoint::from_angle(base + alpha),
            ] {
                if let Some(conn) = verify_candidate(surface, cone.id, chart, origin, dir, bound) {
                    insert_canonical(&mut found, conn);
                }
            }

            // Interior rays: corridor unfolding. Split the wedge so every
            // window stays below pi/2 and cross-product interval tests are
            // valid.
            let parts = (alpha / std::f64::consts::FRAC_PI_2).ceil().max(1.0) as usize;
            let mut seen: HashSet<(i64, i64)> = HashSet::new();
            for part in 0..parts {
                let lo = PlanePoint::from_angle(base + alpha * part as f64 / parts as f64);
                let hi = PlanePoint::from_angle(base + alpha * (part as f64 + 1.0) / parts as f64);
                corridors_used += unfold_wedge(
                    surface,
                    cone.id,
                    chart,
                    origin,
                    lo,
                    hi,
                    bound,
                    options.corridor_cap.saturating_sub(corridors_used),
                    &mut seen,
                    &mut found,
                )
                .map_err(|()| SaddleError::Explosion {
                    cap: options.corridor_cap,
                    bound,
                })?;
            }
        }
    }

    let mut out: Vec<SaddleConnection> = found.into_values().collect();
    out.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then(a.displacement.angle().total_cmp(&b.displacement.angle()))
            .then(a.start_cone.cmp(&b.start_cone))
            .then(a.end_cone.cmp(&b.end_cone))
    });
    Ok(out)
}

type CanonicalKey = (usize, usize, i64, i64);

const QUANTUM: f64 = 1e-8;

fn quantize(x: f64) -> i64 {
    (x / QUANTUM).round() as i64
}

struct VerifiedConnection {
    start_cone: usize,
    end_cone: usize,
    displacement: PlanePoint,
    /// Displacement of the reversed connection, developed in the arrival
    /// corner's chart.
    reverse_displacement: PlanePoint,
    length: f64,
}

/// Canonical key up to reversal: the lexicographically smaller of the two
/// endpoint representations.
fn canonical_key(conn: &VerifiedConnection) -> (CanonicalKey, bool) {
    let fwd = (
        conn.start_cone,
        conn.end_cone,
        quantize(conn.displacement.x),
        quantize(conn.displacement.y),
    );
    let rev = (
        conn.end_cone,
        conn.start_cone,
        quantize(conn.reverse_displacement.x),
        quantize(conn.reverse_displacement.y),
    );
    if fwd <= rev {
        (fwd, true)
    } else {
        (rev, false)
    }
}

fn insert_canonical(found: &mut BTreeMap<CanonicalKey, SaddleConnection>, conn: VerifiedConnection) {
    let (key, forward) = canonical_key(&conn);
    let record = if forward {
        SaddleConnection {
            start_cone: conn.start_cone,
            end_cone: conn.end_cone,
            displacement: conn.displacement,
            length: conn.length,
        }
    } else {
        SaddleConnection {
            start_cone: conn.end_cone,
            end_cone: conn.start_cone,
            displacement: conn.reverse_displacement,
            length: conn.length,
        }
    };
    found.entry(key).or_insert(record);
}

/// Re-trace a candidate displacement from the cone corner and accept it only
/// if the path ends on a cone point within the bound. Tracing stops at the
/// first cone point, so a candidate whose ray passes a nearer cone point is
/// rejected by the length check at the call site.
fn verify_candidate(
    surface: &FlatConeSurface,
    start_cone: usize,
    chart: usize,
    origin: PlanePoint,
    dir: PlanePoint,
    bound: f64,
) -> Option<VerifiedConnection> {
    let eps = surface.epsilon();
    let start = DirectedPoint::new(chart, origin, dir);
    let path = match trace(surface, start, bound + 10.0 * eps) {
        Ok(p) => p,
        Err(TraceError::NumericalStall { .. }) => return None,
        Err(_) => return None,
    };
    match path.terminal {
        Terminal::ConePointHit(hit) => {
            if path.length <= eps || path.length > bound + 10.0 * eps {
                return None;
            }
            let displacement = dir.unit() * path.length;
            let reverse_displacement = -hit.arrival_direction.unit() * path.length;
            Some(VerifiedConnection {
                start_cone,
                end_cone: hit.cone_point,
                displacement,
                reverse_displacement,
                length: path.length,
            })
        }
        Terminal::LengthReached => None,
    }
}

struct Corridor {
    chart: usize,
    place: Isometry,
    lo: PlanePoint,
    hi: PlanePoint,
    /// Edge of `chart` the corridor entered through; never expanded back.
    entry: Option<usize>,
}

/// Breadth-first corridor search within one angular wedge at a cone corner.
/// Returns the number of corridors expanded; `Err(())` when the budget is
/// exhausted.
#[allow(clippy::too_many_arguments)]
fn unfold_wedge(
    surface: &FlatConeSurface,
    cone: usize,
    chart: usize,
    origin: PlanePoint,
    lo: PlanePoint,
    hi: PlanePoint,
    bound: f64,
    budget: usize,
    seen: &mut HashSet<(i64, i64)>,
    found: &mut BTreeMap<CanonicalKey, SaddleConnection>,
) -> Result<usize, ()> {
    let eps = surface.epsilon();
    let win_tol = 1e-9;
    let mut queue = VecDeque::new();
    queue.push_back(Corridor {
        chart,
        place: Isometry::translation(-origin),
        lo,
        hi,
        entry: None,
    });
    let mut used = 0usize;

    while let Some(c) = queue.pop_front() {
        used += 1;
        if used > budget {
            return Err(());
        }
        let verts = surface.chart_vertices(c.chart);
        let n = verts.len();

        // Candidate vertices of this placement.
        for (v, &p) in verts.iter().enumerate() {
            let w = c.place.apply(p);
            let r = w.norm();
            if r <= eps || r > bound + eps {
                continue;
            }
            let class = surface.class_of_corner(c.chart, v);
            if surface.cone_at_class(class).is_none() {
                continue;
            }
            let d = w.unit();
            if c.lo.cross(d) < -win_tol || d.cross(c.hi) < -win_tol {
                continue;
            }
            let key = (quantize(w.x), quantize(w.y));
            if !seen.insert(key) {
                continue;
            }
            if let Some(conn) = verify_candidate(surface, cone, chart, origin, d, bound) {
                // Keep it only when the verified length matches this
                // developed vertex: a nearer cone on the same ray wins.
                if (conn.length - r).abs() <= 10.0 * eps {
                    insert_canonical(found, conn);
                }
            }
        }

        // Expand across every edge whose subtended window is still visible
        // and within reach.
        for e in 0..n {
            if Some(e) == c.entry {
                continue;
            }
            let a = c.place.apply(verts[e]);
            let b = c.place.apply(verts[(e + 1) % n]);
            if a.norm() <= eps || b.norm() <= eps {
                continue; // edge incident to the developed cone point
            }
            let cr = a.cross(b);
            if cr.abs() <= 1e-12 * a.norm() * b.norm() {
                continue; // radial edge: covered by the boundary-ray traces
            }
            let (s_lo, s_hi) = if cr > 0.0 {
                (a.unit(), b.unit())
            } else {
                (b.unit(), a.unit())
            };
            let new_lo = if c.lo.cross(s_lo) >= 0.0 { s_lo } else { c.lo };
            let new_hi = if s_hi.cross(c.hi) >= 0.0 { s_hi } else { c.hi };
            // A window pinched to zero width carries nothing its positive
            // neighbors miss (windows are closed), and letting it through
            // spins corridors around the pinch vertex forever.
            if new_lo.cross(new_hi) <= 1e-12 {
                continue;
            }
            if dist_point_segment(PlanePoint::ZERO, a, b) > bound + eps {
                continue;
            }
            let crossing = {
                let (gi, is_from) = surface.gluing_at(c.chart, e);
                Crossing::new(gi, is_from)
            };
            let ((next_chart, next_edge), iso) = surface.cross(crossing);
            queue.push_back(Corridor {
                chart: next_chart,
                place: c.place.compose(&iso.inverse()),
                lo: new_lo,
                hi: new_hi,
                entry: Some(next_edge),
            });
        }
    }
    Ok(used)
}
