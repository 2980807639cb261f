//! Flat cone surfaces built from glued Euclidean polygons.
//!
//! The crate models nonpositively curved flat cone metrics presented as
//! counterclockwise polygons with edge identifications, and provides:
//!
//! - surface construction and validation ([`surface`]),
//! - straight-line geodesic tracing and cone-point continuations
//!   ([`geodesic`]),
//! - saddle-connection enumeration by corridor unfolding ([`saddle`]),
//! - holonomy of closed curves and the quadratic-differential decision
//!   ([`holonomy`]),
//! - chain-based cone-angle estimation ([`chains`]),
//! - marked length spectrum entries for curve words ([`spectrum`]).

pub mod chains;
pub mod fixtures;
pub mod geodesic;
pub mod geom;
pub mod holonomy;
pub mod rotation;
pub mod saddle;
pub mod spectrum;
pub mod surface;
mod triangulate;

pub use geom::{Isometry, PlanePoint, EPS_ANGLE, EPS_GEOM};
pub use rotation::{RationalAngle, RotationClass};
pub use surface::{
    build_surface, BuildOptions, ConePoint, Crossing, EdgeGluing, EdgeRef, FlatConeSurface,
    PolygonChart, SurfaceError, SurfaceFile, VertexClass,
};
