//! Straight-line geodesic tracing across charts, behavior at cone points,
//! and the grid-coverage density statistic.
//!
//! Away from cone points a geodesic is a straight line in each chart; the
//! tracer applies the gluing isometry at every edge crossing. Arrival within
//! the geometric tolerance of a polygon vertex counts as hitting that
//! vertex's surface point: a cone point (or retained marked point) stops the
//! trace, while a dropped flat vertex is passed through in a straight line
//! developed through its sector fan.

use serde::Serialize;
use thiserror::Error;

use crate::geom::{PlanePoint, TWO_PI};
use crate::surface::{Crossing, EdgeRef, FlatConeSurface};

/// A point with a unit direction in a chart.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DirectedPoint {
    /// Internal chart index.
    pub chart: usize,
    pub position: PlanePoint,
    pub direction: PlanePoint,
}

impl DirectedPoint {
    pub fn new(chart: usize, position: PlanePoint, direction: PlanePoint) -> Self {
        DirectedPoint {
            chart,
            position,
            direction: direction.unit(),
        }
    }

    pub fn reversed(&self) -> DirectedPoint {
        DirectedPoint {
            chart: self.chart,
            position: self.position,
            direction: -self.direction,
        }
    }
}

/// One chart transition along a traced path.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingEvent {
    /// The edge the path exited through.
    pub edge: EdgeRef,
    pub exit_point: PlanePoint,
    /// The gluing applied, with its crossing direction.
    pub gluing: usize,
    pub forward: bool,
}

/// A maximal straight piece of the path within one chart.
#[derive(Debug, Clone, Serialize)]
pub struct Segment {
    pub chart: usize,
    pub start: PlanePoint,
    pub end: PlanePoint,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.start.dist(self.end)
    }
}

/// Why a trace stopped.
#[derive(Debug, Clone, Serialize)]
pub enum Terminal {
    LengthReached,
    ConePointHit(ConePointHit),
}

/// Arrival data at a cone point, sufficient to continue the geodesic.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConePointHit {
    pub cone_point: usize,
    /// The corner (chart, vertex) through which the path arrived.
    pub chart: usize,
    pub vertex: usize,
    /// Unit direction of travel at arrival, in that chart.
    pub arrival_direction: PlanePoint,
}

/// A traced geodesic path.
#[derive(Debug, Clone, Serialize)]
pub struct GeodesicPath {
    pub start: DirectedPoint,
    pub segments: Vec<Segment>,
    pub crossings: Vec<CrossingEvent>,
    pub length: f64,
    pub terminal: Terminal,
}

impl GeodesicPath {
    /// State at the end of the path: last position and direction of travel.
    pub fn end(&self) -> DirectedPoint {
        match self.segments.last() {
            Some(seg) => {
                let dir = if seg.length() > 0.0 {
                    (seg.end - seg.start).unit()
                } else {
                    self.start.direction
                };
                DirectedPoint {
                    chart: seg.chart,
                    position: seg.end,
                    direction: dir,
                }
            }
            None => self.start,
        }
    }
}

/// Side of the incoming direction at a cone point, for continuations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("start point is not inside chart {0}")]
    StartOutsideChart(usize),
    #[error("direction has zero length")]
    ZeroDirection,
    #[error(
        "numerical stall: step progress {progress:.3e} fell below {floor:.3e} \
         (grazing or corner pathology)"
    )]
    NumericalStall { progress: f64, floor: f64 },
    #[error("trace exceeded {0} crossings without reaching the length bound")]
    TooManyCrossings(usize),
}

const MAX_CROSSINGS: usize = 50_000_000;

/// Trace the straight-line geodesic from `start` for `max_length` length
/// units, applying gluing isometries at crossings and stopping early at a
/// cone point.
pub fn trace(
    surface: &FlatConeSurface,
    start: DirectedPoint,
    max_length: f64,
) -> Result<GeodesicPath, TraceError> {
    let eps = surface.epsilon();
    let stall_floor = eps * 1e-3;
    if start.direction.norm() == 0.0 || !start.direction.is_finite() {
        return Err(TraceError::ZeroDirection);
    }
    let start = DirectedPoint::new(start.chart, start.position, start.direction);
    if !surface.point_in_chart(start.chart, start.position) {
        return Err(TraceError::StartOutsideChart(start.chart));
    }

    let mut segments = Vec::new();
    let mut crossings = Vec::new();
    let mut length = 0.0f64;
    let mut chart = start.chart;
    let mut pos = start.position;
    let mut dir = start.direction;
    let mut entry_edge: Option<usize> = None;

    if max_length <= 0.0 {
        return Ok(GeodesicPath {
            start,
            segments,
            crossings,
            length: 0.0,
            terminal: Terminal::LengthReached,
        });
    }

    loop {
        if crossings.len() >= MAX_CROSSINGS {
            return Err(TraceError::TooManyCrossings(MAX_CROSSINGS));
        }
        let exit = first_exit(surface, chart, pos, dir, entry_edge, eps)?;
        let step = exit.t;
        let remaining = max_length - length;
        if step >= remaining {
            let end = pos + dir * remaining;
            segments.push(Segment {
                chart,
                start: pos,
                end,
            });
            length = max_length;
            return Ok(GeodesicPath {
                start,
                segments,
                crossings,
                length,
                terminal: Terminal::LengthReached,
            });
        }

        segments.push(Segment {
            chart,
            start: pos,
            end: exit.point,
        });
        length += step;

        if let Some(v) = exit.vertex {
            let class = surface.class_of_corner(chart, v);
            if let Some(cone) = surface.cone_at_class(class) {
                return Ok(GeodesicPath {
                    start,
                    segments,
                    crossings,
                    length,
                    terminal: Terminal::ConePointHit(ConePointHit {
                        cone_point: cone,
                        chart,
                        vertex: v,
                        arrival_direction: dir,
                    }),
                });
            }
            // Dropped flat vertex: develop straight through the 2 pi fan.
            let through = continue_through_class(surface, class, chart, v, dir, Side::Left);
            chart = through.chart;
            pos = through.position;
            dir = through.direction;
            entry_edge = None;
            continue;
        }

        if step < stall_floor {
            return Err(TraceError::NumericalStall {
                progress: step,
                floor: stall_floor,
            });
        }

        // Ordinary crossing: apply the gluing isometry.
        let (gi, is_from) = surface.gluing_at(chart, exit.edge);
        let crossing = Crossing::new(gi, is_from);
        let ((next_chart, next_edge), iso) = surface.cross(crossing);
        crossings.push(CrossingEvent {
            edge: EdgeRef::new(surface.chart_id(chart), exit.edge),
            exit_point: exit.point,
            gluing: gi,
            forward: is_from,
        });
        pos = iso.apply(exit.point);
        dir = iso.apply_dir(dir);
        chart = next_chart;
        entry_edge = Some(next_edge);
    }
}

struct Exit {
    t: f64,
    edge: usize,
    point: PlanePoint,
    vertex: Option<usize>,
}

/// First boundary hit of the ray `pos + t dir` against the chart boundary.
/// The entry edge is excluded: a straight chord cannot exit through the edge
/// it arrived on except collinearly, and near-parallel entries would
/// otherwise re-trigger it at float-noise distances.
fn first_exit(
    surface: &FlatConeSurface,
    chart: usize,
    pos: PlanePoint,
    dir: PlanePoint,
    entry_edge: Option<usize>,
    eps: f64,
) -> Result<Exit, TraceError> {
    let verts = surface.chart_vertices(chart);
    let n = verts.len();
    let t_min = eps * 1e-6;
    let mut best: Option<Exit> = None;
    for e in 0..n {
        if Some(e) == entry_edge {
            continue;
        }
        let a = verts[e];
        let b = verts[(e + 1) % n];
        let ab = b - a;
        let denom = dir.cross(ab);
        if denom.abs() < 1e-15 {
            continue; // parallel; collinear grazing handled below
        }
        let t = (a - pos).cross(ab) / denom;
        let u = (a - pos).cross(dir) / denom;
        let u_tol = eps / ab.norm();
        if t > t_min && (-u_tol..=1.0 + u_tol).contains(&u) && best.as_ref().is_none_or(|x| t < x.t)
        {
            let point = a + ab * u.clamp(0.0, 1.0);
            let vertex = if point.dist(a) <= eps {
                Some(e)
            } else if point.dist(b) <= eps {
                Some((e + 1) % n)
            } else {
                None
            };
            best = Some(Exit {
                t,
                edge: e,
                point,
                vertex,
            });
        }
    }
    // Vertices on the ray ahead of the start: a ray running along an edge
    // has no transversal exit there, and a ray passing within tolerance of a
    // vertex counts as hitting it even when an edge crossing lies beyond.
    let mut best_vertex: Option<(f64, usize)> = None;
    for (v, &p) in verts.iter().enumerate() {
        let d = p - pos;
        let t = d.dot(dir);
        if t > t_min && d.cross(dir).abs() <= eps && best_vertex.is_none_or(|(bt, _)| t < bt) {
            best_vertex = Some((t, v));
        }
    }
    if let Some((t, v)) = best_vertex {
        if best.as_ref().is_none_or(|x| t <= x.t + eps) {
            return Ok(Exit {
                t,
                edge: v, // nominal: the hit is reported through `vertex`
                point: verts[v],
                vertex: Some(v),
            });
        }
    }
    best.ok_or(TraceError::NumericalStall {
        progress: 0.0,
        floor: eps * 1e-3,
    })
}

/// Continuation through a vertex class. The arrival ray enters through the
/// corner `(chart, vertex)` with travel direction `dir`; the departure makes
/// an angle of exactly pi with the arrival on the chosen side, developed
/// through the class's sector fan. Left is the side lying counterclockwise
/// from the arrival direction. For a flat class (theta = 2 pi) both sides
/// coincide with the straight continuation.
fn continue_through_class(
    surface: &FlatConeSurface,
    class_idx: usize,
    chart: usize,
    vertex: usize,
    dir: PlanePoint,
    side: Side,
) -> DirectedPoint {
    let class = surface.class(class_idx);
    let theta = class.theta();
    let k = class
        .position((chart, vertex))
        .expect("corner belongs to its class");
    // Developed angle of the arrival ray's away-direction.
    let away = -dir;
    let mut local = (away.angle() - class.base_angle[k]).rem_euclid(TWO_PI);
    if local > class.interior[k] {
        // The away direction must lie inside the corner's sector; snap float
        // spill at the boundary.
        if local - class.interior[k] < TWO_PI - local {
            local = class.interior[k];
        } else {
            local = 0.0;
        }
    }
    let arrival_dev = class.cumulative[k] + local;
    let departure_dev = match side {
        // ccw(D_left -> A) = pi and ccw(A -> D_right) = pi in the developed
        // cone of circumference theta.
        Side::Left => (arrival_dev - std::f64::consts::PI).rem_euclid(theta),
        Side::Right => (arrival_dev + std::f64::consts::PI).rem_euclid(theta),
    };
    departure_point(surface, class_idx, departure_dev)
}

/// The departing ray at the developed angle `dev` (mod theta) around the
/// class, as a directed point at the corner vertex of the sector containing
/// it.
pub fn departure_point(surface: &FlatConeSurface, class_idx: usize, dev: f64) -> DirectedPoint {
    let class = surface.class(class_idx);
    let theta = class.theta();
    let dev = dev.rem_euclid(theta);
    let mut k = class.corners.len() - 1;
    for i in 0..class.corners.len() {
        let hi = class.cumulative[i] + class.interior[i];
        if dev <= hi + 1e-12 {
            k = i;
            break;
        }
    }
    let local = (dev - class.cumulative[k]).clamp(0.0, class.interior[k]);
    let (chart, vertex) = class.corners[k];
    let angle = class.base_angle[k] + local;
    DirectedPoint {
        chart,
        position: surface.vertex(chart, vertex),
        direction: PlanePoint::from_angle(angle),
    }
}

/// Developed angle (in the class fan) of the away-direction of an arrival.
pub fn developed_arrival_angle(surface: &FlatConeSurface, hit: &ConePointHit) -> f64 {
    let class_idx = surface.cone_point(hit.cone_point).class;
    let class = surface.class(class_idx);
    let k = class
        .position((hit.chart, hit.vertex))
        .expect("hit corner belongs to the cone class");
    let local = ((-hit.arrival_direction).angle() - class.base_angle[k]).rem_euclid(TWO_PI);
    let local = local.min(class.interior[k]);
    class.cumulative[k] + local
}

/// Continue a geodesic that hit a cone point: the departure direction makes
/// an angle of exactly pi with the arrival on the chosen side. Both
/// continuations exist since theta >= 2 pi.
pub fn continue_at_cone_point(
    surface: &FlatConeSurface,
    hit: &ConePointHit,
    side: Side,
) -> DirectedPoint {
    let class_idx = surface.cone_point(hit.cone_point).class;
    continue_through_class(
        surface,
        class_idx,
        hit.chart,
        hit.vertex,
        hit.arrival_direction,
        side,
    )
}

/// Membership test for the closure of the nonsingular geodesics: the side
/// where the angle is pi must be constant or switch exactly once along the
/// recorded cone-point passages.
pub fn is_admissible_limit_path(sides: &[Side]) -> bool {
    let switches = sides.windows(2).filter(|w| w[0] != w[1]).count();
    switches <= 1
}

/// Fraction of grid cells entered by a traced path. Each chart's bounding
/// box carries a `resolution x resolution` grid; only cells whose center
/// lies in the chart polygon count.
pub fn density_profile(
    surface: &FlatConeSurface,
    start: DirectedPoint,
    total_length: f64,
    resolution: usize,
) -> Result<f64, TraceError> {
    assert!(resolution >= 1);
    let path = trace(surface, start, total_length)?;
    let mut grids: Vec<Grid> = (0..surface.chart_count())
        .map(|c| Grid::new(surface, c, resolution))
        .collect();
    for seg in &path.segments {
        grids[seg.chart].mark_segment(seg.start, seg.end);
    }
    let valid: usize = grids.iter().map(|g| g.valid).sum();
    let hit: usize = grids.iter().map(|g| g.hit_count()).sum();
    Ok(hit as f64 / valid as f64)
}

struct Grid {
    x0: f64,
    y0: f64,
    cell_w: f64,
    cell_h: f64,
    resolution: usize,
    inside: Vec<bool>,
    marked: Vec<bool>,
    valid: usize,
}

impl Grid {
    fn new(surface: &FlatConeSurface, chart: usize, resolution: usize) -> Grid {
        let verts = surface.chart_vertices(chart);
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for v in verts {
            x0 = x0.min(v.x);
            y0 = y0.min(v.y);
            x1 = x1.max(v.x);
            y1 = y1.max(v.y);
        }
        let cell_w = (x1 - x0) / resolution as f64;
        let cell_h = (y1 - y0) / resolution as f64;
        let mut inside = vec![false; resolution * resolution];
        let mut valid = 0;
        for j in 0..resolution {
            for i in 0..resolution {
                let c = PlanePoint::new(
                    x0 + (i as f64 + 0.5) * cell_w,
                    y0 + (j as f64 + 0.5) * cell_h,
                );
                if surface.point_in_chart(chart, c) {
                    inside[j * resolution + i] = true;
                    valid += 1;
                }
            }
        }
        Grid {
            x0,
            y0,
            cell_w,
            cell_h,
            resolution,
            inside,
            marked: vec![false; resolution * resolution],
            valid,
        }
    }

    fn mark(&mut self, p: PlanePoint) {
        let i = ((p.x - self.x0) / self.cell_w).floor() as isize;
        let j = ((p.y - self.y0) / self.cell_h).floor() as isize;
        let n = self.resolution as isize;
        let (i, j) = (i.clamp(0, n - 1) as usize, j.clamp(0, n - 1) as usize);
        self.marked[j * self.resolution + i] = true;
    }

    fn mark_segment(&mut self, a: PlanePoint, b: PlanePoint) {
        // Conservative sampling at a third of the cell pitch.
        let step = (self.cell_w.min(self.cell_h) / 3.0).max(1e-12);
        let len = a.dist(b);
        let n = (len / step).ceil() as usize;
        for k in 0..=n {
            let t = if n == 0 { 0.0 } else { k as f64 / n as f64 };
            self.mark(a + (b - a) * t);
        }
    }

    fn hit_count(&self) -> usize {
        self.marked
            .iter()
            .zip(&self.inside)
            .filter(|(m, i)| **m && **i)
            .count()
    }
}
