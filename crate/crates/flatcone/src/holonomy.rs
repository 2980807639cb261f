//! Holonomy of closed curves and the quadratic-differential decision.
//!
//! On a flat cone surface the local holonomy group is trivial and parallel
//! transport is invariant under homotopy, so the holonomy of a closed curve
//! presented as a cyclic word of gluing crossings is the exact sum of the
//! signed crossing rotations mod 2 pi. The metric comes from a holomorphic
//! quadratic differential iff every cone angle is `k pi` with `k >= 3` and
//! the holonomy group is contained in ±Id.

use serde::Serialize;
use thiserror::Error;

use crate::rotation::{RationalAngle, RotationClass};
use crate::surface::{AngleDecision, Crossing, FlatConeSurface};

/// A closed curve presented combinatorially as a cyclic sequence of directed
/// gluing crossings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraphLoop {
    pub word: Vec<Crossing>,
}

impl DualGraphLoop {
    pub fn new(word: Vec<Crossing>) -> Self {
        DualGraphLoop { word }
    }

    pub fn inverse(&self) -> DualGraphLoop {
        DualGraphLoop {
            word: self.word.iter().rev().map(|c| c.reversed()).collect(),
        }
    }

    /// Concatenation (both loops must be based at the same chart).
    pub fn concat(&self, other: &DualGraphLoop) -> DualGraphLoop {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        DualGraphLoop { word }
    }
}

#[derive(Debug, Error)]
pub enum HolonomyError {
    #[error("loop is not closed: crossing {index} departs from chart {found} but the walk is at chart {expected}")]
    OpenLoop {
        index: usize,
        expected: i64,
        found: i64,
    },
    #[error("loop ends at chart {end} but started at chart {start}")]
    NotALoop { start: i64, end: i64 },
    #[error("empty loop word")]
    Empty,
}

/// Compose the signed crossing rotations along a closed loop; exact.
pub fn transport(
    surface: &FlatConeSurface,
    curve: &DualGraphLoop,
) -> Result<RotationClass, HolonomyError> {
    if curve.word.is_empty() {
        return Err(HolonomyError::Empty);
    }
    let start = surface.crossing_source(curve.word[0]);
    let mut at = start;
    let mut total = RationalAngle::zero();
    for (i, &c) in curve.word.iter().enumerate() {
        let src = surface.crossing_source(c);
        if src != at {
            return Err(HolonomyError::OpenLoop {
                index: i,
                expected: surface.chart_id(at),
                found: surface.chart_id(src),
            });
        }
        total = total + surface.crossing_rotation(c).angle();
        at = surface.crossing_target(c);
    }
    if at != start {
        return Err(HolonomyError::NotALoop {
            start: surface.chart_id(start),
            end: surface.chart_id(at),
        });
    }
    Ok(total.mod_two_pi())
}

/// One loop per non-tree gluing of the chart-adjacency dual graph (relative
/// to a breadth-first spanning tree rooted at chart 0), plus one loop
/// encircling each cone point. Homotopy invariance of transport makes this
/// set generate all holonomy values.
pub fn generating_loops(surface: &FlatConeSurface) -> Vec<DualGraphLoop> {
    let n = surface.chart_count();
    let mut parent: Vec<Option<Crossing>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = std::collections::VecDeque::from([0usize]);
    let mut in_tree = vec![false; surface.gluings().len()];
    seen[0] = true;
    while let Some(u) = order.pop_front() {
        for (gi, g) in surface.gluings().iter().enumerate() {
            for (fwd, (a, b)) in [(true, (g.from.0, g.to.0)), (false, (g.to.0, g.from.0))] {
                if a == u && !seen[b] {
                    seen[b] = true;
                    in_tree[gi] = true;
                    parent[b] = Some(Crossing::new(gi, fwd));
                    order.push_back(b);
                }
            }
        }
    }

    // Tree path from the root to a chart, as a crossing word.
    let path_from_root = |mut v: usize| -> Vec<Crossing> {
        let mut rev = Vec::new();
        while let Some(c) = parent[v] {
            rev.push(c);
            v = surface.crossing_source(c);
        }
        rev.reverse();
        rev
    };

    let mut loops = Vec::new();
    for (gi, g) in surface.gluings().iter().enumerate() {
        if in_tree[gi] {
            continue;
        }
        let mut word = path_from_root(g.from.0);
        word.push(Crossing::new(gi, true));
        let back = path_from_root(g.to.0);
        word.extend(back.iter().rev().map(|c| c.reversed()));
        loops.push(DualGraphLoop::new(word));
    }

    for cone in surface.cone_points() {
        loops.push(cone_loop(surface, cone.id));
    }
    loops
}

/// A loop encircling the given cone point, oriented so that its transport is
/// exactly theta(p) mod 2 pi.
pub fn cone_loop(surface: &FlatConeSurface, cone: usize) -> DualGraphLoop {
    let class = surface.class(surface.cone_point(cone).class);
    // The corner chase around the class composes to -theta mod 2 pi, so the
    // encircling loop is the reversed chase.
    DualGraphLoop::new(class.chase.iter().rev().map(|c| c.reversed()).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorRotation {
    /// Crossing word as `(gluing index, forward)` pairs.
    pub word: Vec<(usize, bool)>,
    pub rotation: RotationClass,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HolonomyWitness {
    Generator { index: usize, rotation: RotationClass },
    ConePoint { cone: usize, rotation: RotationClass },
}

/// Condition (2) of the characterization: all generator and cone rotations
/// lie in `{0, pi}` mod 2 pi.
#[derive(Debug, Clone, Serialize)]
pub struct HolonomyReport {
    pub generator_rotations: Vec<GeneratorRotation>,
    /// Cone angles mod 2 pi, by cone point id (marked points excluded).
    pub cone_rotations: Vec<(usize, RotationClass)>,
    pub group_is_pm_identity: bool,
    pub witnesses: Vec<HolonomyWitness>,
    /// True when a decision had to fall back on float tolerance.
    pub approximate: bool,
}

pub fn holonomy_condition(surface: &FlatConeSurface) -> HolonomyReport {
    let mut generator_rotations = Vec::new();
    let mut witnesses = Vec::new();
    for (i, lp) in generating_loops(surface).iter().enumerate() {
        let rotation = transport(surface, lp).expect("generating loops are closed");
        if !rotation.is_plus_minus_identity() {
            witnesses.push(HolonomyWitness::Generator { index: i, rotation });
        }
        generator_rotations.push(GeneratorRotation {
            word: lp.word.iter().map(|c| (c.gluing, c.forward)).collect(),
            rotation,
        });
    }
    let mut cone_rotations = Vec::new();
    for (id, angle) in surface.cone_angles() {
        let rotation = angle.mod_two_pi();
        if !rotation.is_plus_minus_identity() {
            witnesses.push(HolonomyWitness::ConePoint { cone: id, rotation });
        }
        cone_rotations.push((id, rotation));
    }
    HolonomyReport {
        generator_rotations,
        cone_rotations,
        group_is_pm_identity: witnesses.is_empty(),
        witnesses,
        approximate: false,
    }
}

/// The full decision with reasons.
#[derive(Debug, Clone, Serialize)]
pub struct QdDecision {
    pub is_quadratic_differential: bool,
    pub angle: AngleDecision,
    pub holonomy: HolonomyReport,
    pub reasons: Vec<String>,
}

/// Decide whether the flat cone metric comes from a holomorphic quadratic
/// differential: every cone angle `k pi` with integer `k >= 3`, and
/// `Hol(S) = ±Id`.
pub fn is_quadratic_differential_metric(surface: &FlatConeSurface) -> QdDecision {
    let angle = surface.angle_condition();
    let holonomy = holonomy_condition(surface);
    let mut reasons = Vec::new();
    for (id, a) in &angle.witnesses {
        reasons.push(format!("cone point {} has angle {}, not k pi with k >= 3", id, a));
    }
    for w in &holonomy.witnesses {
        match w {
            HolonomyWitness::Generator { index, rotation } => {
                reasons.push(format!("generator loop {} has holonomy {}", index, rotation));
            }
            HolonomyWitness::ConePoint { cone, rotation } => {
                reasons.push(format!("loop around cone point {} has holonomy {}", cone, rotation));
            }
        }
    }
    QdDecision {
        is_quadratic_differential: angle.holds && holonomy.group_is_pm_identity,
        angle,
        holonomy,
        reasons,
    }
}
