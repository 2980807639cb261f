//! Flat geodesic lengths of closed-curve homotopy classes.
//!
//! A class is presented as a cyclic word of gluing crossings. The word's
//! chart corridor is developed into the plane over the triangulated shadow
//! surface, where the deck transformation is `z -> R(rho) z + c` with `rho`
//! the exact composed rotation. The shortest representative is found by a
//! taut-path (rubber band) computation over the corridor portals; when the
//! taut path binds at a corridor-boundary vertex whose off-corridor angle is
//! below pi, the corridor is pivoted past that vertex (rerouted through the
//! complementary sector fan) and the computation repeats. Lengths decrease
//! monotonically and the loop stops when they stall.

use serde::Serialize;
use thiserror::Error;

use crate::geom::{Isometry, PlanePoint};
use crate::surface::{Crossing, FlatConeSurface};
use crate::triangulate::{TriangulateError, TriangulatedSurface};

/// A closed curve as a cyclic word of directed gluing crossings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveWord {
    pub crossings: Vec<Crossing>,
}

impl CurveWord {
    pub fn new(crossings: Vec<Crossing>) -> Self {
        CurveWord { crossings }
    }

    /// Parse the file form: a list of `[chart, edge, direction]` triples.
    /// Direction `1` crosses the gluing leaving the chart through that edge;
    /// `-1` crosses it in the opposite sense (arriving through the edge).
    pub fn from_triples(
        surface: &FlatConeSurface,
        triples: &[(i64, usize, i64)],
    ) -> Result<CurveWord, SpectrumError> {
        let mut crossings = Vec::with_capacity(triples.len());
        for &(chart_id, edge, dir) in triples {
            let chart = surface
                .chart_index(chart_id)
                .ok_or(SpectrumError::BadCrossing { chart: chart_id, edge })?;
            if edge >= surface.chart_vertices(chart).len() || !matches!(dir, 1 | -1) {
                return Err(SpectrumError::BadCrossing { chart: chart_id, edge });
            }
            let (gluing, is_from) = surface.gluing_at(chart, edge);
            let forward = if dir == 1 { is_from } else { !is_from };
            crossings.push(Crossing::new(gluing, forward));
        }
        Ok(CurveWord { crossings })
    }

    pub fn to_triples(&self, surface: &FlatConeSurface) -> Vec<(i64, usize, i64)> {
        self.crossings
            .iter()
            .map(|c| {
                let g = &surface.gluings()[c.gluing];
                let (chart, edge) = if c.forward { g.from } else { g.to };
                (surface.chart_id(chart), edge, 1)
            })
            .collect()
    }

    pub fn inverse(&self) -> CurveWord {
        CurveWord {
            crossings: self.crossings.iter().rev().map(|c| c.reversed()).collect(),
        }
    }

    pub fn rotated(&self, k: usize) -> CurveWord {
        let mut c = self.crossings.clone();
        let n = c.len().max(1);
        c.rotate_left(k % n);
        CurveWord { crossings: c }
    }
}

/// One marked-length-spectrum entry.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEntry {
    pub length: f64,
    /// Number of corridor pivots performed while tightening.
    pub tightening_iterations: usize,
    /// Translation corridor with a positive-width family of minimizers.
    pub flat_strip: bool,
}

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("empty curve word")]
    EmptyWord,
    #[error("crossing references unknown edge (chart {chart}, edge {edge}) or bad direction")]
    BadCrossing { chart: i64, edge: usize },
    #[error("word is not closed: crossing {index} departs from chart {found}, expected {expected}")]
    OpenWord {
        index: usize,
        expected: i64,
        found: i64,
    },
    #[error("word is null-homotopic: no geodesic representative")]
    NullHomotopic,
    #[error("tightening did not converge within {0} pivots")]
    NonConvergent(usize),
    #[error(transparent)]
    Triangulate(#[from] TriangulateError),
    #[error("triangulated shadow surface failed to build: {0}")]
    Shadow(String),
    #[error("word {word} is invalid on the second surface: {reason}")]
    WordInvalidOnB { word: usize, reason: String },
}

const MAX_PIVOTS: usize = 10_000;

/// Compute the flat geodesic length of the homotopy class of `word`.
pub fn geodesic_length(
    surface: &FlatConeSurface,
    word: &CurveWord,
) -> Result<SpectrumEntry, SpectrumError> {
    let tri = TriangulatedSurface::new(surface)?;
    geodesic_length_with(surface, &tri, word)
}

/// One entry per word; per-word errors are collected, not fatal.
pub fn marked_spectrum(
    surface: &FlatConeSurface,
    words: &[CurveWord],
) -> Vec<Result<SpectrumEntry, SpectrumError>> {
    match TriangulatedSurface::new(surface) {
        Ok(tri) => words
            .iter()
            .map(|w| geodesic_length_with(surface, &tri, w))
            .collect(),
        Err(e) => {
            let msg = e.to_string();
            words
                .iter()
                .map(|_| Err(SpectrumError::Shadow(msg.clone())))
                .collect()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareEntry {
    pub word: usize,
    pub length_a: f64,
    pub length_b: f64,
    pub relative_difference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub entries: Vec<CompareEntry>,
    pub max_relative_difference: f64,
}

/// Per-word length pairs on two surfaces with the same combinatorial
/// presentation, plus the maximal relative difference.
pub fn compare_spectra(
    a: &FlatConeSurface,
    b: &FlatConeSurface,
    words: &[CurveWord],
) -> Result<CompareReport, SpectrumError> {
    let tri_a = TriangulatedSurface::new(a)?;
    let tri_b = TriangulatedSurface::new(b)?;
    let mut entries = Vec::new();
    let mut max_rel = 0.0f64;
    for (i, w) in words.iter().enumerate() {
        let la = geodesic_length_with(a, &tri_a, w)?;
        let lb = geodesic_length_with(b, &tri_b, w).map_err(|e| SpectrumError::WordInvalidOnB {
            word: i,
            reason: e.to_string(),
        })?;
        let rel = (la.length - lb.length).abs() / la.length.max(lb.length).max(f64::MIN_POSITIVE);
        max_rel = max_rel.max(rel);
        entries.push(CompareEntry {
            word: i,
            length_a: la.length,
            length_b: lb.length,
            relative_difference: rel,
        });
    }
    Ok(CompareReport {
        entries,
        max_relative_difference: max_rel,
    })
}

fn geodesic_length_with(
    surface: &FlatConeSurface,
    tri: &TriangulatedSurface,
    word: &CurveWord,
) -> Result<SpectrumEntry, SpectrumError> {
    if word.crossings.is_empty() {
        return Err(SpectrumError::EmptyWord);
    }
    validate_closed(surface, &word.crossings)?;
    let reduced = reduce_cyclic(word.crossings.clone());
    if reduced.is_empty() {
        return Err(SpectrumError::NullHomotopic);
    }
    let shadow_word = to_shadow_word(surface, tri, &reduced);
    tighten(&tri.surface, tri, shadow_word)
}

fn validate_closed(surface: &FlatConeSurface, word: &[Crossing]) -> Result<(), SpectrumError> {
    let start = surface.crossing_source(word[0]);
    let mut at = start;
    for (i, &c) in word.iter().enumerate() {
        let src = surface.crossing_source(c);
        if src != at {
            return Err(SpectrumError::OpenWord {
                index: i,
                expected: surface.chart_id(at),
                found: surface.chart_id(src),
            });
        }
        at = surface.crossing_target(c);
    }
    if at != start {
        return Err(SpectrumError::OpenWord {
            index: 0,
            expected: surface.chart_id(start),
            found: surface.chart_id(at),
        });
    }
    Ok(())
}

/// Free cancellation of adjacent inverse crossings, cyclically.
fn reduce_cyclic(mut word: Vec<Crossing>) -> Vec<Crossing> {
    loop {
        let mut out: Vec<Crossing> = Vec::with_capacity(word.len());
        for c in word.drain(..) {
            if out.last().is_some_and(|l| l.is_inverse_of(c)) {
                out.pop();
            } else {
                out.push(c);
            }
        }
        // Cyclic ends.
        let mut changed = false;
        while out.len() >= 2 && out[0].is_inverse_of(*out.last().unwrap()) {
            out.pop();
            out.remove(0);
            changed = true;
        }
        if !changed {
            return out;
        }
        word = out;
    }
}

/// Map an original-surface word to the triangulated shadow: each crossing
/// becomes its shadow gluing, with the unique diagonal route injected
/// between consecutive crossings.
fn to_shadow_word(
    surface: &FlatConeSurface,
    tri: &TriangulatedSurface,
    word: &[Crossing],
) -> Vec<Crossing> {
    let m = word.len();
    let mut out = Vec::new();
    for i in 0..m {
        let prev = word[(i + m - 1) % m];
        let cur = word[i];
        // Entry edge: the far side of the previous crossing, in shadow
        // coordinates.
        let prev_g = &surface.gluings()[prev.gluing];
        let entry = tri.boundary[&if prev.forward { prev_g.to } else { prev_g.from }];
        let cur_g = &surface.gluings()[cur.gluing];
        let exit = tri.boundary[&if cur.forward { cur_g.from } else { cur_g.to }];
        out.extend(tri.route(entry, exit));
        out.push(Crossing::new(tri.gluing_map[cur.gluing], cur.forward));
    }
    reduce_cyclic(out)
}

struct Corridor {
    word: Vec<Crossing>,
    /// `placements[i]` develops the source chart of `word[i]`.
    placements: Vec<Isometry>,
    /// Developed crossed edge per word position.
    portals: Vec<(PlanePoint, PlanePoint)>,
    deck: Isometry,
}

fn develop(shadow: &FlatConeSurface, word: Vec<Crossing>) -> Corridor {
    let m = word.len();
    let mut placements = Vec::with_capacity(m);
    let mut portals = Vec::with_capacity(m);
    let mut place = Isometry::identity();
    for &c in &word {
        placements.push(place);
        let g = &shadow.gluings()[c.gluing];
        let (chart, edge) = if c.forward { g.from } else { g.to };
        let a = shadow.vertex(chart, edge);
        let b = shadow.vertex(chart, edge + 1);
        portals.push((place.apply(a), place.apply(b)));
        let (_, iso) = shadow.cross(c);
        place = place.compose(&iso.inverse());
    }
    Corridor {
        word,
        placements,
        portals,
        deck: place,
    }
}

struct TautPath {
    t: Vec<f64>,
    length: f64,
}

fn path_points(c: &Corridor, t: &[f64]) -> Vec<PlanePoint> {
    c.portals
        .iter()
        .zip(t)
        .map(|(&(a, b), &tj)| a + (b - a) * tj)
        .collect()
}

fn path_length(c: &Corridor, ys: &[PlanePoint]) -> f64 {
    let mut len = 0.0;
    for (j, y) in ys.iter().enumerate() {
        let next = if j + 1 < ys.len() {
            ys[j + 1]
        } else {
            c.deck.apply(ys[0])
        };
        len += next.dist(*y);
    }
    len
}

/// Snap taut points to the developed vertices they bind at and sum the
/// straight spans between consecutive anchors. Between anchors a taut path
/// is straight, so this removes the residual zigzag of coordinate descent;
/// passing within snap distance of a vertex changes the length only at
/// second order.
fn anchored_length(
    shadow: &FlatConeSurface,
    c: &Corridor,
    ys: &[PlanePoint],
    snap: f64,
) -> Option<f64> {
    let mut anchors: Vec<PlanePoint> = Vec::new();
    for (j, y) in ys.iter().enumerate() {
        if let Some((chart, k)) = vertex_near(shadow, c, j, *y, snap) {
            let v = c.placements[j].apply(shadow.vertex(chart, k));
            if anchors.last().is_none_or(|a| a.dist(v) > snap) {
                anchors.push(v);
            }
        }
    }
    if anchors.is_empty() {
        return None;
    }
    let mut len = 0.0;
    for w in anchors.windows(2) {
        len += w[0].dist(w[1]);
    }
    len += anchors.last().unwrap().dist(c.deck.apply(anchors[0]));
    Some(len)
}

/// Vertex of the source chart of `word[j]` within `snap` of the developed
/// point, if any.
fn vertex_near(
    shadow: &FlatConeSurface,
    c: &Corridor,
    j: usize,
    v: PlanePoint,
    snap: f64,
) -> Option<(usize, usize)> {
    let chart = shadow.crossing_source(c.word[j]);
    let place = &c.placements[j];
    let verts = shadow.chart_vertices(chart);
    (0..verts.len())
        .find(|&k| place.apply(verts[k]).dist(v) <= snap)
        .map(|k| (chart, k))
}

/// Cyclic coordinate descent over the portal parameters; each 1D problem is
/// convex and solved by golden-section search.
fn optimize(c: &Corridor) -> TautPath {
    let m = c.portals.len();
    let mut t = vec![0.5f64; m];
    // Coordinate descent zigzags when the taut path grazes portal
    // endpoints; periodically pushing near-boundary parameters onto the
    // boundary is a warm restart that escapes that regime. The pushes are
    // not persistent: every coordinate is re-optimized afterwards.
    for phase in 0..4 {
        descent_sweeps(c, &mut t, if phase < 3 { 400 } else { 1200 });
        if phase < 3 {
            for tj in t.iter_mut() {
                if *tj < 0.05 {
                    *tj = 0.0;
                } else if *tj > 0.95 {
                    *tj = 1.0;
                }
            }
        }
    }
    let ys = path_points(c, &t);
    let length = path_length(c, &ys);
    TautPath { t, length }
}

fn descent_sweeps(c: &Corridor, t: &mut [f64], max_sweeps: usize) {
    let m = c.portals.len();
    let mut ys = path_points(c, t);
    let mut best = path_length(c, &ys);
    let golden = 0.618_033_988_749_894_9_f64;
    let mut sweep = 0usize;
    while sweep < max_sweeps {
        sweep += 1;
        for j in 0..m {
            let (a, b) = c.portals[j];
            let e = b - a;
            let prev = if j == 0 { m - 1 } else { j - 1 };
            let eval = |tj: f64| -> f64 {
                let y = a + e * tj;
                if m == 1 {
                    return c.deck.apply(y).dist(y);
                }
                let incoming = if j == 0 {
                    // Term m-1 runs y_{m-1} -> deck(y_0).
                    c.deck.apply(y).dist(ys[prev])
                } else {
                    y.dist(ys[prev])
                };
                let outgoing = if j + 1 < m {
                    ys[j + 1].dist(y)
                } else {
                    c.deck.apply(ys[0]).dist(y)
                };
                incoming + outgoing
            };
            // Golden-section search on [0, 1].
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut x1 = hi - golden * (hi - lo);
            let mut x2 = lo + golden * (hi - lo);
            let (mut f1, mut f2) = (eval(x1), eval(x2));
            for _ in 0..90 {
                if f1 <= f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - golden * (hi - lo);
                    f1 = eval(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + golden * (hi - lo);
                    f2 = eval(x2);
                }
            }
            let tj = 0.5 * (lo + hi);
            t[j] = tj;
            ys[j] = a + e * tj;
        }
        let len = path_length(c, &ys);
        if sweep >= 10 && best - len < 1e-14 * (1.0 + len) {
            return;
        }
        best = len;
    }
}

/// Feasibility interval of the straight chord `y0 -> y0 + c` through the
/// portal sequence, for translation decks. Returns `(length, width)` where
/// `width` is the transverse extent of the feasible family in length units.
fn straight_chord(c: &Corridor, eps: f64) -> Option<(f64, f64)> {
    if !c.deck.rot.mod_two_pi().is_zero() {
        return None;
    }
    let dir = c.deck.t;
    let dn = dir.norm();
    if dn <= eps {
        return None;
    }
    let (a0, b0) = c.portals[0];
    let e0 = b0 - a0;
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut prev_s: Option<(f64, f64)> = None; // affine s_{j-1}
    for j in 1..c.portals.len() {
        let (aj, bj) = c.portals[j];
        let ej = bj - aj;
        let denom = dir.cross(ej);
        if denom.abs() <= 1e-12 * dn * ej.norm() {
            return None; // portal parallel to the chord; leave to the taut path
        }
        let base = aj - a0;
        // s_j(t) and u_j(t) are affine in the base parameter t.
        let s_p = base.cross(ej) / denom;
        let s_q = -e0.cross(ej) / denom;
        let u_p = base.cross(dir) / denom;
        let u_q = -e0.cross(dir) / denom;
        let u_tol = eps / ej.norm();
        let s_tol = eps / dn;
        apply_affine(&mut lo, &mut hi, u_p, u_q, -u_tol, 1.0 + u_tol)?;
        apply_affine(&mut lo, &mut hi, s_p, s_q, -s_tol, 1.0 + s_tol)?;
        if let Some((pp, pq)) = prev_s {
            // Ordering: s_j >= s_{j-1}.
            apply_affine(&mut lo, &mut hi, s_p - pp, s_q - pq, -s_tol, f64::INFINITY)?;
        }
        prev_s = Some((s_p, s_q));
    }
    if lo > hi {
        return None;
    }
    Some((dn, (hi - lo) * e0.norm()))
}

/// Constrain `value_lo <= p + q t <= value_hi` onto `[lo, hi]`; `None` when
/// the interval empties.
fn apply_affine(
    lo: &mut f64,
    hi: &mut f64,
    p: f64,
    q: f64,
    value_lo: f64,
    value_hi: f64,
) -> Option<()> {
    if q.abs() < 1e-15 {
        if p < value_lo || p > value_hi {
            return None;
        }
        return Some(());
    }
    let (mut a, mut b) = ((value_lo - p) / q, (value_hi - p) / q);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if value_hi.is_infinite() {
        if q > 0.0 {
            *lo = lo.max((value_lo - p) / q);
        } else {
            *hi = hi.min((value_lo - p) / q);
        }
    } else {
        *lo = lo.max(a);
        *hi = hi.min(b);
    }
    if lo > hi {
        None
    } else {
        Some(())
    }
}

struct Bend {
    /// Portal range whose taut points coincide at the vertex.
    first: usize,
    last: usize,
    point: PlanePoint,
    turn_abs: f64,
}

/// Locate the first taut-path bend that violates geodesy: the off-corridor
/// angle at the binding vertex class is below pi.
fn find_pivot(shadow: &FlatConeSurface, c: &Corridor, ys: &[PlanePoint]) -> Option<Bend> {
    let m = ys.len();
    let snap = 1e-6;
    let mut j = 0;
    while j < m {
        // Grow a cluster of consecutive equal points.
        let mut last = j;
        while last + 1 < m && ys[last + 1].dist(ys[j]) <= snap {
            last += 1;
        }
        let v = ys[j];
        let is_vertex = vertex_at(shadow, c, j, v).is_some();
        if is_vertex {
            let prev = if j == 0 {
                c.deck.inverse().apply(ys[m - 1])
            } else {
                ys[j - 1]
            };
            let next = if last + 1 < m {
                ys[last + 1]
            } else {
                c.deck.apply(ys[0])
            };
            let w1 = v - prev;
            let w2 = next - v;
            if w1.norm() > snap && w2.norm() > snap {
                let turn = w1.cross(w2).atan2(w1.dot(w2)).abs();
                // A straight pass-through (turn ~ 0) is locally geodesic on
                // both sides; only material turns can violate geodesy.
                if turn > 1e-6 {
                    // Corridor-side angle is pi + turn; the other side of the
                    // vertex class must still offer at least pi.
                    let class = shadow.class_of_corner(
                        vertex_at(shadow, c, j, v).unwrap().0,
                        vertex_at(shadow, c, j, v).unwrap().1,
                    );
                    let theta = shadow.class(class).theta();
                    if theta - (std::f64::consts::PI + turn) < std::f64::consts::PI - 1e-9 {
                        return Some(Bend {
                            first: j,
                            last,
                            point: v,
                            turn_abs: turn,
                        });
                    }
                }
            }
        }
        j = last + 1;
    }
    None
}

/// The chart corner of the source chart of `word[j]` sitting at the
/// developed point `v`, if any.
fn vertex_at(
    shadow: &FlatConeSurface,
    c: &Corridor,
    j: usize,
    v: PlanePoint,
) -> Option<(usize, usize)> {
    vertex_near(shadow, c, j, v, 1e-6)
}

/// Corner of the chart after crossing `word[j]` (the cluster's exit chart).
fn vertex_after(
    shadow: &FlatConeSurface,
    c: &Corridor,
    j: usize,
    v: PlanePoint,
) -> Option<(usize, usize)> {
    let chart = shadow.crossing_target(c.word[j]);
    let place = if j + 1 < c.placements.len() {
        c.placements[j + 1]
    } else {
        c.deck
    };
    let verts = shadow.chart_vertices(chart);
    (0..verts.len())
        .find(|&k| place.apply(verts[k]).dist(v) <= 1e-6)
        .map(|k| (chart, k))
}

/// Replace the corridor passage around the bend vertex with the
/// complementary arc of the vertex class's corner cycle.
fn pivot_word(
    shadow: &FlatConeSurface,
    c: &Corridor,
    bend: &Bend,
) -> Option<Vec<Crossing>> {
    // Corners visited around the vertex: sources of word[first..=last],
    // plus the chart after word[last].
    let mut corners = Vec::new();
    for j in bend.first..=bend.last {
        corners.push(vertex_at(shadow, c, j, bend.point)?);
    }
    corners.push(vertex_after(shadow, c, bend.last, bend.point)?);

    let class_idx = shadow.class_of_corner(corners[0].0, corners[0].1);
    let class = shadow.class(class_idx);
    let cycle_len = class.corners.len();
    let pos: Vec<usize> = corners
        .iter()
        .map(|&corner| class.position(corner))
        .collect::<Option<Vec<_>>>()?;
    // The passage must walk the cycle one step at a time, consistently.
    let ascending = pos[1] == (pos[0] + 1) % cycle_len;
    for w in pos.windows(2) {
        let expect = if ascending {
            (w[0] + 1) % cycle_len
        } else {
            (w[0] + cycle_len - 1) % cycle_len
        };
        if w[1] != expect {
            return None;
        }
    }
    let a = pos[0];
    let b = *pos.last().unwrap();
    // Complementary route from corner a to corner b, the other way around.
    let mut replacement = Vec::new();
    let mut i = a;
    if ascending {
        while i != b {
            let prev = (i + cycle_len - 1) % cycle_len;
            replacement.push(class.chase[prev].reversed());
            i = prev;
        }
    } else {
        while i != b {
            replacement.push(class.chase[i]);
            i = (i + 1) % cycle_len;
        }
    }

    let mut word = Vec::with_capacity(c.word.len() - (bend.last - bend.first + 1) + replacement.len());
    word.extend_from_slice(&c.word[..bend.first]);
    word.extend_from_slice(&replacement);
    word.extend_from_slice(&c.word[bend.last + 1..]);
    Some(reduce_cyclic(word))
}

fn tighten(
    shadow: &FlatConeSurface,
    _tri: &TriangulatedSurface,
    mut word: Vec<Crossing>,
) -> Result<SpectrumEntry, SpectrumError> {
    let eps = shadow.epsilon();
    let mut pivots = 0usize;
    let mut last_len = f64::INFINITY;
    loop {
        if word.is_empty() {
            return Err(SpectrumError::NullHomotopic);
        }
        let corridor = develop(shadow, word.clone());
        if corridor.deck.is_identity(10.0 * eps) {
            return Err(SpectrumError::NullHomotopic);
        }

        if let Some((length, width)) = straight_chord(&corridor, eps) {
            return Ok(SpectrumEntry {
                length,
                tightening_iterations: pivots,
                flat_strip: width > 10.0 * eps,
            });
        }

        let taut = optimize(&corridor);
        let ys = path_points(&corridor, &taut.t);
        let refined = anchored_length(shadow, &corridor, &ys, 1e-6)
            .map(|a| a.min(taut.length))
            .unwrap_or(taut.length);
        match find_pivot(shadow, &corridor, &ys) {
            None => {
                let flat_strip = straight_chord(&corridor, eps)
                    .map(|(_, w)| w > 10.0 * eps)
                    .unwrap_or(false);
                return Ok(SpectrumEntry {
                    length: refined,
                    tightening_iterations: pivots,
                    flat_strip,
                });
            }
            Some(bend) => {
                let new_word = match pivot_word(shadow, &corridor, &bend) {
                    Some(w) => w,
                    // A malformed cluster means the taut path is not actually
                    // binding there; accept the current length.
                    None => {
                        return Ok(SpectrumEntry {
                            length: refined,
                            tightening_iterations: pivots,
                            flat_strip: false,
                        });
                    }
                };
                pivots += 1;
                if pivots > MAX_PIVOTS {
                    return Err(SpectrumError::NonConvergent(MAX_PIVOTS));
                }
                debug_assert!(
                    refined <= last_len + 1e-9,
                    "tightening must be monotone: {refined} > {last_len}"
                );
                // Stall guard: stop once pivots no longer make progress.
                if last_len - refined < eps && pivots > 1 {
                    return Ok(SpectrumEntry {
                        length: refined,
                        tightening_iterations: pivots - 1,
                        flat_strip: false,
                    });
                }
                last_len = refined;
                let _ = bend.turn_abs;
                word = new_word;
            }
        }
    }
}
