//! Build and validate flat cone surfaces presented as Euclidean polygons
//! with edge gluings.
//!
//! A gluing is an orientation-preserving isometry `z -> R(rot) z + t` that
//! maps its from-edge onto its to-edge with reversed boundary orientation.
//! Rotations are exact rational multiples of pi, which keeps cone angles and
//! holonomy exactly decidable.

use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{
    point_in_polygon, polygon_signed_area2, segments_intersect, Isometry, PlanePoint, EPS_ANGLE,
    EPS_GEOM, TWO_PI,
};
use crate::rotation::{RationalAngle, RotationClass};

/// One Euclidean polygon chart. Vertices are counterclockwise; edge `i` runs
/// from vertex `i` to vertex `i+1 mod n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonChart {
    pub id: i64,
    pub vertices: Vec<PlanePoint>,
}

impl PolygonChart {
    pub fn new(id: i64, vertices: Vec<PlanePoint>) -> Self {
        PolygonChart { id, vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// A directed reference to one polygon edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub chart: i64,
    pub edge: usize,
}

impl EdgeRef {
    pub fn new(chart: i64, edge: usize) -> Self {
        EdgeRef { chart, edge }
    }
}

/// An edge identification: the isometry `z -> R(rotation) z + translation`
/// maps the from-edge onto the to-edge with reversed boundary orientation.
/// When `translation` is `None` it is inferred from the edge endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGluing {
    pub from: EdgeRef,
    pub to: EdgeRef,
    pub rotation: RotationClass,
    pub translation: Option<PlanePoint>,
}

impl EdgeGluing {
    pub fn new(from: EdgeRef, to: EdgeRef, rotation: RotationClass) -> Self {
        EdgeGluing {
            from,
            to,
            rotation,
            translation: None,
        }
    }
}

/// A directed crossing of one gluing: `forward` walks from the from-chart
/// into the to-chart. The shared alphabet for holonomy loops and curve words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub gluing: usize,
    pub forward: bool,
}

impl Crossing {
    pub fn new(gluing: usize, forward: bool) -> Self {
        Crossing { gluing, forward }
    }

    pub fn reversed(self) -> Self {
        Crossing {
            gluing: self.gluing,
            forward: !self.forward,
        }
    }

    pub fn is_inverse_of(self, other: Crossing) -> bool {
        self.gluing == other.gluing && self.forward != other.forward
    }
}

/// A polygon corner: chart index and vertex index.
pub type Corner = (usize, usize);

/// An equivalence class of polygon corners identified by the gluings,
/// with the developed sector data around the common surface point.
#[derive(Debug, Clone)]
pub struct VertexClass {
    /// Corners in cyclic chase order, starting from the smallest corner.
    pub corners: Vec<Corner>,
    /// `chase[i]` is the crossing that leads from `corners[i]` to
    /// `corners[i+1 mod len]`.
    pub chase: Vec<Crossing>,
    /// Total angle as an exact rational multiple of pi.
    pub angle: RationalAngle,
    /// Interior angle of each corner (radians).
    pub interior: Vec<f64>,
    /// Developed start angle of each corner's sector; `cumulative[0] = 0`.
    pub cumulative: Vec<f64>,
    /// Chart angle of each corner's outgoing edge ray (the sector start).
    pub base_angle: Vec<f64>,
}

impl VertexClass {
    pub fn theta(&self) -> f64 {
        self.angle.radians()
    }

    pub fn is_flat(&self) -> bool {
        self.angle.ratio() == Ratio::from_integer(2)
    }

    /// Index of `corner` in the cycle.
    pub fn position(&self, corner: Corner) -> Option<usize> {
        self.corners.iter().position(|&c| c == corner)
    }
}

/// A cone point (or retained marked point): a vertex class with its angle.
#[derive(Debug, Clone)]
pub struct ConePoint {
    pub id: usize,
    pub class: usize,
    pub angle: RationalAngle,
}

/// Options controlling surface construction.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Geometric tolerance for edge matching and point tests.
    pub epsilon: f64,
    /// Keep vertex classes of angle exactly 2 pi as marked points usable as
    /// saddle-connection endpoints. Default: dropped.
    pub keep_marked_points: bool,
    /// Accept cone angles below 2 pi (positively curved cones). Default:
    /// rejected, since everything downstream assumes CAT(0).
    pub allow_angle_below_two_pi: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            epsilon: EPS_GEOM,
            keep_marked_points: false,
            allow_angle_below_two_pi: false,
        }
    }
}

impl BuildOptions {
    pub fn with_marked_points() -> Self {
        BuildOptions {
            keep_marked_points: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("chart {chart}: {reason}")]
    BadChart { chart: i64, reason: String },
    #[error("duplicate chart id {0}")]
    DuplicateChart(i64),
    #[error("gluing {gluing} references unknown edge ({chart}, {edge})")]
    BadReference { gluing: usize, chart: i64, edge: usize },
    #[error("edge ({chart}, {edge}) referenced by more than one gluing")]
    DuplicateEdge { chart: i64, edge: usize },
    #[error("edge ({chart}, {edge}) is not glued; the surface is not closed")]
    NonClosed { chart: i64, edge: usize },
    #[error("gluing {gluing}: edge lengths differ by {delta} (tolerance {eps})")]
    EdgeLengthMismatch { gluing: usize, delta: f64, eps: f64 },
    #[error(
        "gluing {gluing}: isometry does not map the from-edge onto the to-edge \
         with reversed boundary orientation ({detail})"
    )]
    OrientationError { gluing: usize, detail: String },
    #[error("the glued surface is disconnected")]
    Disconnected,
    #[error("Gauss-Bonnet violation: {detail}")]
    GaussBonnetViolation { detail: String },
    #[error("vertex class at corner (chart {chart}, vertex {vertex}) has cone angle {angle} < 2 pi")]
    ConeAngleBelowTwoPi { chart: i64, vertex: usize, angle: String },
}

/// The witness report of the angle condition: every cone angle must be
/// `k pi` with integer `k >= 3`.
#[derive(Debug, Clone, Serialize)]
pub struct AngleDecision {
    pub holds: bool,
    /// Offending cone points and their angles (as fractions of pi).
    pub witnesses: Vec<(usize, RationalAngle)>,
    /// True when any decision had to fall back on float tolerance.
    pub approximate: bool,
}

#[derive(Debug, Clone)]
struct Chart {
    id: i64,
    vertices: Vec<PlanePoint>,
}

impl Chart {
    fn len(&self) -> usize {
        self.vertices.len()
    }

    fn vertex(&self, i: usize) -> PlanePoint {
        self.vertices[i % self.len()]
    }

    /// Edge vector of edge `i` (from vertex i to vertex i+1).
    fn edge_vec(&self, i: usize) -> PlanePoint {
        self.vertex(i + 1) - self.vertex(i)
    }
}

/// A resolved gluing with its forward isometry (from-chart coordinates into
/// to-chart coordinates).
#[derive(Debug, Clone)]
pub struct Gluing {
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub rotation: RotationClass,
    pub iso: Isometry,
}

/// A flat cone surface: immutable after construction, safe to share across
/// threads.
#[derive(Debug, Clone)]
pub struct FlatConeSurface {
    charts: Vec<Chart>,
    id_to_index: HashMap<i64, usize>,
    gluings: Vec<Gluing>,
    /// `(chart, edge) -> (gluing index, edge is the from-side)`.
    edge_map: HashMap<(usize, usize), (usize, bool)>,
    vertex_classes: Vec<VertexClass>,
    corner_class: HashMap<Corner, usize>,
    cone_points: Vec<ConePoint>,
    /// Vertex class index -> cone point id, for classes that are cone points
    /// or retained marked points.
    class_cone: HashMap<usize, usize>,
    chi: i64,
    genus: i64,
    epsilon: f64,
    options: BuildOptions,
}

/// Spec'd operation name; forwards to [`FlatConeSurface::build`].
pub fn build_surface(
    charts: Vec<PolygonChart>,
    gluings: Vec<EdgeGluing>,
    options: BuildOptions,
) -> Result<FlatConeSurface, SurfaceError> {
    FlatConeSurface::build(charts, gluings, options)
}

impl FlatConeSurface {
    pub fn build(
        charts: Vec<PolygonChart>,
        gluings: Vec<EdgeGluing>,
        options: BuildOptions,
    ) -> Result<FlatConeSurface, SurfaceError> {
        let eps = options.epsilon;

        // Chart validation: simple, counterclockwise, positive area.
        let mut id_to_index = HashMap::new();
        let mut internal = Vec::with_capacity(charts.len());
        for (idx, c) in charts.iter().enumerate() {
            if c.vertices.len() < 3 {
                return Err(SurfaceError::BadChart {
                    chart: c.id,
                    reason: "fewer than 3 vertices".into(),
                });
            }
            if c.vertices.iter().any(|v| !v.is_finite()) {
                return Err(SurfaceError::BadChart {
                    chart: c.id,
                    reason: "non-finite coordinates".into(),
                });
            }
            let area2 = polygon_signed_area2(&c.vertices);
            if area2 <= eps {
                return Err(SurfaceError::BadChart {
                    chart: c.id,
                    reason: format!("signed area {} is not positive (need counterclockwise order)", area2 / 2.0),
                });
            }
            if !is_simple_polygon(&c.vertices) {
                return Err(SurfaceError::BadChart {
                    chart: c.id,
                    reason: "self-intersecting boundary".into(),
                });
            }
            if id_to_index.insert(c.id, idx).is_some() {
                return Err(SurfaceError::DuplicateChart(c.id));
            }
            internal.push(Chart {
                id: c.id,
                vertices: c.vertices.clone(),
            });
        }

        // Resolve gluings, check each edge is used exactly once.
        let mut resolved = Vec::with_capacity(gluings.len());
        let mut edge_map: HashMap<(usize, usize), (usize, bool)> = HashMap::new();
        for (gi, g) in gluings.iter().enumerate() {
            let lookup = |r: &EdgeRef| -> Result<(usize, usize), SurfaceError> {
                let ci = *id_to_index.get(&r.chart).ok_or(SurfaceError::BadReference {
                    gluing: gi,
                    chart: r.chart,
                    edge: r.edge,
                })?;
                if r.edge >= internal[ci].len() {
                    return Err(SurfaceError::BadReference {
                        gluing: gi,
                        chart: r.chart,
                        edge: r.edge,
                    });
                }
                Ok((ci, r.edge))
            };
            let from = lookup(&g.from)?;
            let to = lookup(&g.to)?;
            for (side, key) in [(true, from), (false, to)] {
                if edge_map.insert(key, (gi, side)).is_some() {
                    return Err(SurfaceError::DuplicateEdge {
                        chart: internal[key.0].id,
                        edge: key.1,
                    });
                }
            }

            let a0 = internal[from.0].vertex(from.1);
            let a1 = internal[from.0].vertex(from.1 + 1);
            let b0 = internal[to.0].vertex(to.1);
            let b1 = internal[to.0].vertex(to.1 + 1);
            let la = (a1 - a0).norm();
            let lb = (b1 - b0).norm();
            if (la - lb).abs() > eps {
                return Err(SurfaceError::EdgeLengthMismatch {
                    gluing: gi,
                    delta: (la - lb).abs(),
                    eps,
                });
            }

            let (cos, sin) = g.rotation.cos_sin();
            let rotated = (a1 - a0).rotate(cos, sin);
            // Reversed boundary orientation: a0 -> b1, a1 -> b0.
            if (rotated + (b1 - b0)).norm() > 10.0 * eps {
                return Err(SurfaceError::OrientationError {
                    gluing: gi,
                    detail: format!(
                        "rotated from-edge vector ({:.3e}, {:.3e}) should equal the reversed \
                         to-edge vector ({:.3e}, {:.3e}); an orientation-preserving identification \
                         must reverse the boundary",
                        rotated.x, rotated.y, b0.x - b1.x, b0.y - b1.y
                    ),
                });
            }
            let t = match g.translation {
                Some(t) => {
                    let img0 = a0.rotate(cos, sin) + t;
                    let img1 = a1.rotate(cos, sin) + t;
                    if img0.dist(b1) > 10.0 * eps || img1.dist(b0) > 10.0 * eps {
                        return Err(SurfaceError::OrientationError {
                            gluing: gi,
                            detail: "stated translation does not carry the from-edge onto the to-edge".into(),
                        });
                    }
                    t
                }
                None => b1 - a0.rotate(cos, sin),
            };
            resolved.push(Gluing {
                from,
                to,
                rotation: g.rotation,
                iso: Isometry::new(g.rotation.angle(), t),
            });
        }

        // Closedness: every edge glued.
        for (ci, c) in internal.iter().enumerate() {
            for e in 0..c.len() {
                if !edge_map.contains_key(&(ci, e)) {
                    return Err(SurfaceError::NonClosed {
                        chart: c.id,
                        edge: e,
                    });
                }
            }
        }

        // Connectivity of the chart adjacency graph.
        if !internal.is_empty() {
            let mut seen = vec![false; internal.len()];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(c) = queue.pop_front() {
                for g in &resolved {
                    for (u, v) in [(g.from.0, g.to.0), (g.to.0, g.from.0)] {
                        if u == c && !seen[v] {
                            seen[v] = true;
                            queue.push_back(v);
                        }
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(SurfaceError::Disconnected);
            }
        }

        let vertex_classes = chase_vertex_classes(&internal, &resolved, &edge_map)?;

        let mut corner_class = HashMap::new();
        for (k, vc) in vertex_classes.iter().enumerate() {
            for &c in &vc.corners {
                corner_class.insert(c, k);
            }
        }

        // Nonpositive curvature: theta >= 2 pi everywhere unless overridden.
        if !options.allow_angle_below_two_pi {
            for vc in &vertex_classes {
                if vc.angle.ratio() < Ratio::from_integer(2) {
                    let (ci, v) = vc.corners[0];
                    return Err(SurfaceError::ConeAngleBelowTwoPi {
                        chart: internal[ci].id,
                        vertex: v,
                        angle: vc.angle.to_string(),
                    });
                }
            }
        }

        // Euler characteristic from the glued complex and exact Gauss-Bonnet.
        let v_count = vertex_classes.len() as i64;
        let e_count = resolved.len() as i64;
        let f_count = internal.len() as i64;
        let chi = v_count - e_count + f_count;
        let mut curvature_sum = Ratio::<i64>::from_integer(0);
        for vc in &vertex_classes {
            curvature_sum += Ratio::from_integer(2) - vc.angle.ratio();
        }
        if curvature_sum != Ratio::from_integer(2 * chi) {
            return Err(SurfaceError::GaussBonnetViolation {
                detail: format!(
                    "sum of (2 pi - theta) is {} pi but 2 pi chi is {} pi",
                    curvature_sum,
                    2 * chi
                ),
            });
        }
        if (2 - chi) % 2 != 0 {
            return Err(SurfaceError::GaussBonnetViolation {
                detail: format!("odd Euler characteristic {} for a closed oriented surface", chi),
            });
        }
        let genus = (2 - chi) / 2;

        // Cone points: classes with theta != 2 pi, plus retained marked points.
        let mut cone_points = Vec::new();
        let mut class_cone = HashMap::new();
        for (k, vc) in vertex_classes.iter().enumerate() {
            if !vc.is_flat() || options.keep_marked_points {
                let id = cone_points.len();
                cone_points.push(ConePoint {
                    id,
                    class: k,
                    angle: vc.angle,
                });
                class_cone.insert(k, id);
            }
        }

        Ok(FlatConeSurface {
            charts: internal,
            id_to_index,
            gluings: resolved,
            edge_map,
            vertex_classes,
            corner_class,
            cone_points,
            class_cone,
            chi,
            genus,
            epsilon: eps,
            options,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn options(&self) -> &BuildOptions {
        &self.options
    }

    pub fn chart_count(&self) -> usize {
        self.charts.len()
    }

    pub fn chart_id(&self, index: usize) -> i64 {
        self.charts[index].id
    }

    pub fn chart_index(&self, id: i64) -> Option<usize> {
        self.id_to_index.get(&id).copied()
    }

    pub fn chart_vertices(&self, index: usize) -> &[PlanePoint] {
        &self.charts[index].vertices
    }

    pub fn vertex(&self, chart: usize, v: usize) -> PlanePoint {
        self.charts[chart].vertex(v)
    }

    pub fn edge_vector(&self, chart: usize, edge: usize) -> PlanePoint {
        self.charts[chart].edge_vec(edge)
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    /// The gluing at `(chart, edge)` and whether that edge is the from-side.
    pub fn gluing_at(&self, chart: usize, edge: usize) -> (usize, bool) {
        self.edge_map[&(chart, edge)]
    }

    /// Walk the crossing from the side it exits: returns the target
    /// `(chart, edge)` and the isometry mapping source-chart coordinates to
    /// target-chart coordinates.
    pub fn cross(&self, crossing: Crossing) -> ((usize, usize), Isometry) {
        let g = &self.gluings[crossing.gluing];
        if crossing.forward {
            (g.to, g.iso)
        } else {
            (g.from, g.iso.inverse())
        }
    }

    /// Chart the crossing departs from.
    pub fn crossing_source(&self, crossing: Crossing) -> usize {
        let g = &self.gluings[crossing.gluing];
        if crossing.forward {
            g.from.0
        } else {
            g.to.0
        }
    }

    pub fn crossing_target(&self, crossing: Crossing) -> usize {
        let g = &self.gluings[crossing.gluing];
        if crossing.forward {
            g.to.0
        } else {
            g.from.0
        }
    }

    /// Signed rotation acquired by the crossing.
    pub fn crossing_rotation(&self, crossing: Crossing) -> RotationClass {
        let r = self.gluings[crossing.gluing].rotation;
        if crossing.forward {
            r
        } else {
            r.inverse()
        }
    }

    pub fn vertex_classes(&self) -> &[VertexClass] {
        &self.vertex_classes
    }

    pub fn class_of_corner(&self, chart: usize, vertex: usize) -> usize {
        self.corner_class[&(chart, vertex % self.charts[chart].len())]
    }

    pub fn cone_points(&self) -> &[ConePoint] {
        &self.cone_points
    }

    pub fn cone_point(&self, id: usize) -> &ConePoint {
        &self.cone_points[id]
    }

    /// Cone point id at a vertex class, if the class is a cone point or a
    /// retained marked point.
    pub fn cone_at_class(&self, class: usize) -> Option<usize> {
        self.class_cone.get(&class).copied()
    }

    pub fn class(&self, index: usize) -> &VertexClass {
        &self.vertex_classes[index]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.chi
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    /// All vertex classes with theta != 2 pi, with their exact angles.
    pub fn cone_angles(&self) -> Vec<(usize, RationalAngle)> {
        self.cone_points
            .iter()
            .filter(|p| self.vertex_classes[p.class].angle.ratio() != Ratio::from_integer(2))
            .map(|p| (p.id, p.angle))
            .collect()
    }

    /// Condition (1) of the characterization: every cone angle is `k pi`
    /// with integer `k >= 3`. Marked points (theta = 2 pi) do not count.
    pub fn angle_condition(&self) -> AngleDecision {
        let mut witnesses = Vec::new();
        for (id, angle) in self.cone_angles() {
            let ok = angle.is_integer_multiple_of_pi() && angle.numer() >= 3;
            if !ok {
                witnesses.push((id, angle));
            }
        }
        AngleDecision {
            holds: witnesses.is_empty(),
            witnesses,
            approximate: false,
        }
    }

    pub fn point_in_chart(&self, chart: usize, p: PlanePoint) -> bool {
        point_in_polygon(&self.charts[chart].vertices, p, self.epsilon)
    }

    /// Serialize to the surface file JSON format.
    pub fn to_file(&self) -> SurfaceFile {
        SurfaceFile {
            polygons: self
                .charts
                .iter()
                .map(|c| PolygonFile {
                    id: c.id,
                    vertices: c.vertices.iter().map(|v| [v.x, v.y]).collect(),
                })
                .collect(),
            gluings: self
                .gluings
                .iter()
                .map(|g| GluingFile {
                    from: (self.charts[g.from.0].id, g.from.1),
                    to: (self.charts[g.to.0].id, g.to.1),
                    rotation_pi: g.rotation,
                    translation: Some([g.iso.t.x, g.iso.t.y]),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("surface serialization")
    }

    pub fn from_json(json: &str, options: BuildOptions) -> Result<FlatConeSurface, SurfaceFileError> {
        let file: SurfaceFile = serde_json::from_str(json).map_err(SurfaceFileError::Parse)?;
        file.build(options).map_err(SurfaceFileError::Build)
    }
}

#[derive(Debug, Error)]
pub enum SurfaceFileError {
    #[error("invalid surface file: {0}")]
    Parse(#[source] serde_json::Error),
    #[error(transparent)]
    Build(#[from] SurfaceError),
}

/// Corner chasing: from a corner `(chart, v)`, cross the gluing of the edge
/// ending at `v` (edge `v-1`); the next corner is the start vertex of the
/// partner edge. Iterating until return yields the vertex class, and the
/// interior angles along the cycle sum to the cone angle.
fn chase_vertex_classes(
    charts: &[Chart],
    gluings: &[Gluing],
    edge_map: &HashMap<(usize, usize), (usize, bool)>,
) -> Result<Vec<VertexClass>, SurfaceError> {
    let mut visited: HashSet<Corner> = HashSet::new();
    let mut classes = Vec::new();

    let corner_list: Vec<Corner> = charts
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| (0..c.len()).map(move |v| (ci, v)))
        .collect();

    for &start in &corner_list {
        if visited.contains(&start) {
            continue;
        }
        let mut corners = Vec::new();
        let mut chase = Vec::new();
        let mut rotation_sum = RationalAngle::zero();
        let mut current = start;
        loop {
            visited.insert(current);
            corners.push(current);
            let (ci, v) = current;
            let n = charts[ci].len();
            let ending_edge = (v + n - 1) % n;
            let (gi, is_from) = edge_map[&(ci, ending_edge)];
            let crossing = Crossing::new(gi, is_from);
            let g = &gluings[gi];
            let partner = if is_from { g.to } else { g.from };
            rotation_sum = rotation_sum
                + if is_from {
                    g.rotation.angle()
                } else {
                    -g.rotation.angle()
                };
            chase.push(crossing);
            let next = (partner.0, partner.1);
            if next == start {
                break;
            }
            if visited.contains(&next) {
                // A chase re-entering a different class's corner means the
                // identifications are inconsistent.
                return Err(SurfaceError::GaussBonnetViolation {
                    detail: "corner identification cycle is not closed".into(),
                });
            }
            current = next;
        }

        // Interior angle at each corner and the exact total angle. The float
        // sum determines only the integer winding W in
        //   theta = 2 pi W - sum of signed crossing rotations.
        let mut interior = Vec::with_capacity(corners.len());
        let mut base_angle = Vec::with_capacity(corners.len());
        for &(ci, v) in &corners {
            let c = &charts[ci];
            let n = c.len();
            let out_dir = c.vertex(v + 1) - c.vertex(v);
            let in_dir = c.vertex((v + n - 1) % n) - c.vertex(v);
            let mut a = in_dir.angle() - out_dir.angle();
            while a <= 0.0 {
                a += TWO_PI;
            }
            while a > TWO_PI {
                a -= TWO_PI;
            }
            interior.push(a);
            base_angle.push(out_dir.angle());
        }
        let float_total: f64 = interior.iter().sum();
        let winding = ((float_total + rotation_sum.radians()) / TWO_PI).round() as i64;
        let angle = RationalAngle::new(2 * winding, 1) - rotation_sum;
        if (angle.radians() - float_total).abs() > EPS_ANGLE * (corners.len() as f64 + 1.0) {
            return Err(SurfaceError::GaussBonnetViolation {
                detail: format!(
                    "vertex class at (chart {}, vertex {}) has angle sum {:.12} but the gluing \
                     rotations force {} pi = {:.12}",
                    charts[corners[0].0].id,
                    corners[0].1,
                    float_total,
                    angle.ratio(),
                    angle.radians()
                ),
            });
        }

        let mut cumulative = Vec::with_capacity(corners.len());
        let mut acc = 0.0;
        for &a in &interior {
            cumulative.push(acc);
            acc += a;
        }

        classes.push(VertexClass {
            corners,
            chase,
            angle,
            interior,
            cumulative,
            base_angle,
        });
    }
    Ok(classes)
}

fn is_simple_polygon(vs: &[PlanePoint]) -> bool {
    let n = vs.len();
    for i in 0..n {
        let (a, b) = (vs[i], vs[(i + 1) % n]);
        if (b - a).norm() <= EPS_GEOM {
            return false;
        }
        for j in (i + 1)..n {
            // Skip adjacent edges (they share a vertex).
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (c, d) = (vs[j], vs[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Surface file format
// ---------------------------------------------------------------------------

/// The JSON surface file:
/// `{ "polygons": [{ "id": int, "vertices": [[x, y], ...] }],
///    "gluings": [{ "from": [chart, edge], "to": [chart, edge],
///                  "rotation_pi": [num, den], "translation": [x, y] }] }`
/// `translation` may be omitted and is then inferred from edge endpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub polygons: Vec<PolygonFile>,
    pub gluings: Vec<GluingFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonFile {
    pub id: i64,
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GluingFile {
    pub from: (i64, usize),
    pub to: (i64, usize),
    pub rotation_pi: RotationClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translation: Option<[f64; 2]>,
}

impl SurfaceFile {
    pub fn build(&self, options: BuildOptions) -> Result<FlatConeSurface, SurfaceError> {
        let charts = self
            .polygons
            .iter()
            .map(|p| PolygonChart {
                id: p.id,
                vertices: p.vertices.iter().map(|v| PlanePoint::new(v[0], v[1])).collect(),
            })
            .collect();
        let gluings = self
            .gluings
            .iter()
            .map(|g| EdgeGluing {
                from: EdgeRef::new(g.from.0, g.from.1),
                to: EdgeRef::new(g.to.0, g.to.1),
                rotation: g.rotation_pi,
                translation: g.translation.map(|t| PlanePoint::new(t[0], t[1])),
            })
            .collect();
        FlatConeSurface::build(charts, gluings, options)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rotation::RotationClass;
    use num_rational::Ratio;

    fn square(id: i64) -> PolygonChart {
        PolygonChart::new(
            id,
            vec![
                PlanePoint::new(0.0, 0.0),
                PlanePoint::new(1.0, 0.0),
                PlanePoint::new(1.0, 1.0),
                PlanePoint::new(0.0, 1.0),
            ],
        )
    }

    #[test]
    fn edge_length_mismatch_is_rejected() {
        // 2x1 rectangle with the long bottom glued to the short right side
        // by a 2 pi/3 rotation.
        let rect = PolygonChart::new(
            0,
            vec![
                PlanePoint::new(0.0, 0.0),
                PlanePoint::new(2.0, 0.0),
                PlanePoint::new(2.0, 1.0),
                PlanePoint::new(0.0, 1.0),
            ],
        );
        let gluings = vec![
            EdgeGluing::new(EdgeRef::new(0, 0), EdgeRef::new(0, 1), RotationClass::new(2, 3)),
            EdgeGluing::new(EdgeRef::new(0, 2), EdgeRef::new(0, 3), RotationClass::zero()),
        ];
        let err = FlatConeSurface::build(vec![rect], gluings, BuildOptions::default());
        assert!(matches!(err, Err(SurfaceError::EdgeLengthMismatch { .. })));
    }

    #[test]
    fn orientation_preserving_identification_is_rejected() {
        // Gluing bottom to top by a pure translation that matches the
        // endpoints without reversing the boundary (a0 -> b0).
        let mut g = EdgeGluing::new(EdgeRef::new(0, 0), EdgeRef::new(0, 2), RotationClass::pi());
        g.translation = Some(PlanePoint::new(0.0, 1.0));
        let gluings = vec![
            g,
            EdgeGluing::new(EdgeRef::new(0, 1), EdgeRef::new(0, 3), RotationClass::zero()),
        ];
        let err = FlatConeSurface::build(vec![square(0)], gluings, BuildOptions::default());
        assert!(matches!(err, Err(SurfaceError::OrientationError { .. })));
    }

    #[test]
    fn unglued_edge_is_rejected() {
        let gluings = vec![EdgeGluing::new(
            EdgeRef::new(0, 0),
            EdgeRef::new(0, 2),
            RotationClass::zero(),
        )];
        let err = FlatConeSurface::build(vec![square(0)], gluings, BuildOptions::default());
        assert!(matches!(err, Err(SurfaceError::NonClosed { .. })));
    }

    #[test]
    fn doubly_used_edge_is_rejected() {
        let gluings = vec![
            EdgeGluing::new(EdgeRef::new(0, 0), EdgeRef::new(0, 2), RotationClass::zero()),
            EdgeGluing::new(EdgeRef::new(0, 1), EdgeRef::new(0, 2), RotationClass::zero()),
        ];
        let err = FlatConeSurface::build(vec![square(0)], gluings, BuildOptions::default());
        assert!(matches!(err, Err(SurfaceError::DuplicateEdge { .. })));
    }

    #[test]
    fn disconnected_surface_is_rejected() {
        let gluings = vec![
            EdgeGluing::new(EdgeRef::new(0, 0), EdgeRef::new(0, 2), RotationClass::zero()),
            EdgeGluing::new(EdgeRef::new(0, 1), EdgeRef::new(0, 3), RotationClass::zero()),
            EdgeGluing::new(EdgeRef::new(1, 0), EdgeRef::new(1, 2), RotationClass::zero()),
            EdgeGluing::new(EdgeRef::new(1, 1), EdgeRef::new(1, 3), RotationClass::zero()),
        ];
        let err = FlatConeSurface::build(vec![square(0), square(1)], gluings, BuildOptions::default());
        assert!(matches!(err, Err(SurfaceError::Disconnected)));
    }

    #[test]
    fn positively_curved_cone_is_rejected_without_override() {
        // Two congruent sector triangles whose apexes glue to a 4 pi/3 cone.
        let v2 = PlanePoint::new(-0.5, 0.75f64.sqrt());
        let tri = |id| {
            PolygonChart::new(
                id,
                vec![PlanePoint::new(0.0, 0.0), PlanePoint::new(1.0, 0.0), v2],
            )
        };
        let gluings = vec![
            EdgeGluing::new(EdgeRef::new(1, 0), EdgeRef::new(0, 2), RotationClass::new(2, 3)),
            EdgeGluing::new(EdgeRef::new(0, 0), EdgeRef::new(1, 2), RotationClass::new(2, 3)),
            EdgeGluing::new(EdgeRef::new(0, 1), EdgeRef::new(1, 1), RotationClass::pi()),
        ];
        let err = FlatConeSurface::build(
            vec![tri(0), tri(1)],
            gluings.clone(),
            BuildOptions::default(),
        );
        assert!(matches!(err, Err(SurfaceError::ConeAngleBelowTwoPi { .. })));
        let with_override = FlatConeSurface::build(
            vec![tri(0), tri(1)],
            gluings,
            BuildOptions {
                allow_angle_below_two_pi: true,
                ..Default::default()
            },
        );
        assert!(with_override.is_ok());
    }

    #[test]
    fn self_intersecting_chart_is_rejected() {
        let bowtie = PolygonChart::new(
            0,
            vec![
                PlanePoint::new(0.0, 0.0),
                PlanePoint::new(1.0, 1.0),
                PlanePoint::new(1.0, 0.0),
                PlanePoint::new(0.0, 1.0),
            ],
        );
        let gluings = vec![
            EdgeGluing::new(EdgeRef::new(0, 0), EdgeRef::new(0, 2), RotationClass::zero()),
            EdgeGluing::new(EdgeRef::new(0, 1), EdgeRef::new(0, 3), RotationClass::zero()),
        ];
        let err = FlatConeSurface::build(vec![bowtie], gluings, BuildOptions::default());
        assert!(matches!(err, Err(SurfaceError::BadChart { .. })));
    }

    #[test]
    fn double_octagon_slit_join_has_genus_four() {
        // Two octagons with one side pair subdivided at midpoints and the
        // half-sides cross-glued between the copies: the slit join of two
        // genus-2 surfaces. Hand count: V = 2 (one 12 pi class from the two
        // merged cone points, one 4 pi class at the slit ends), E = 10,
        // F = 2, so chi = -6 and g = 4.
        let (charts, _) = fixtures::octagon();
        let v = charts[0].vertices.clone();
        let m0 = (v[0] + v[1]) * 0.5;
        let m4 = (v[4] + v[5]) * 0.5;
        let poly = |id| {
            PolygonChart::new(
                id,
                vec![v[0], m0, v[1], v[2], v[3], v[4], m4, v[5], v[6], v[7]],
            )
        };
        let z = RotationClass::zero;
        let mut gluings = Vec::new();
        for (a, b) in [(0i64, 1i64), (1, 0)] {
            // The slit: the left half of side 0 of each copy glues across to
            // the matching half of side 4 of the other copy.
            gluings.push(EdgeGluing::new(EdgeRef::new(a, 0), EdgeRef::new(b, 6), z()));
        }
        for c in [0i64, 1] {
            gluings.push(EdgeGluing::new(EdgeRef::new(c, 1), EdgeRef::new(c, 5), z()));
            gluings.push(EdgeGluing::new(EdgeRef::new(c, 2), EdgeRef::new(c, 7), z()));
            gluings.push(EdgeGluing::new(EdgeRef::new(c, 3), EdgeRef::new(c, 8), z()));
            gluings.push(EdgeGluing::new(EdgeRef::new(c, 4), EdgeRef::new(c, 9), z()));
        }
        let s = FlatConeSurface::build(vec![poly(0), poly(1)], gluings, BuildOptions::default())
            .unwrap();
        assert_eq!(s.euler_characteristic(), -6);
        assert_eq!(s.genus(), 4);
        let mut angles: Vec<Ratio<i64>> = s.cone_angles().iter().map(|(_, a)| a.ratio()).collect();
        angles.sort();
        assert_eq!(angles, vec![Ratio::from_integer(4), Ratio::from_integer(12)]);
    }

    #[test]
    fn surfaces_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<FlatConeSurface>();
        let s = std::sync::Arc::new(fixtures::build_octagon());
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let s = s.clone();
                std::thread::spawn(move || s.cone_angles().len())
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), 1);
        }
    }

    #[test]
    fn file_round_trip_reproduces_the_surface() {
        let s = fixtures::build_bad_angle();
        let json = s.to_json();
        let again = FlatConeSurface::from_json(&json, BuildOptions::default()).unwrap();
        assert_eq!(s.euler_characteristic(), again.euler_characteristic());
        assert_eq!(s.vertex_classes().len(), again.vertex_classes().len());
        for (a, b) in s.vertex_classes().iter().zip(again.vertex_classes()) {
            assert_eq!(a.angle, b.angle);
            assert_eq!(a.corners, b.corners);
        }
        assert_eq!(json, again.to_json());
    }
}
