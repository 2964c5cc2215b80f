//! Convex bodies represented by sampled support functions.
//!
//! A body is stored as its support values `h(theta_i) = sup_{x in K} <x, theta_i>`
//! on a fixed grid of unit directions shared by every body participating in an
//! experiment.  Minkowski combination, scaling and translation act linearly on
//! support values, which is what makes the representation convenient here.

mod body;
mod bodyfile;
mod grid;
mod homothety;
pub(crate) mod hull2;
mod quadrature;

pub use body::{minkowski_combine, ConvexBody, Descriptor};
pub use bodyfile::parse_body_file;
pub use grid::DirectionGrid;
pub use homothety::{detect_homothety, HomothetyFit, HOMOTHETY_REL_TOL};
pub use quadrature::{CellWeighting, Quadrature, NODE_CAP};

use thiserror::Error;

/// Points and directions are stored as fixed arrays; planar data keeps the
/// third coordinate at zero.
pub type Point = [f64; 3];

/// Convenience constructor for planar points.
pub fn pt2(x: f64, y: f64) -> Point {
    [x, y, 0.0]
}

/// Convenience constructor for spatial points.
pub fn pt3(x: f64, y: f64, z: f64) -> Point {
    [x, y, z]
}

#[inline]
pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("direction grid dimension must be 2 or 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("direction count must be even and at least 64, got {0}")]
    BadDirectionCount(usize),
    #[error("direction {index} is not a unit vector (norm {norm})")]
    NotUnit { index: usize, norm: f64 },
    #[error("planar direction grid must have equal angular spacing")]
    UnevenGrid,
    #[error("ball radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("point has dimension incompatible with the grid ({0})")]
    DimensionMismatch(String),
    #[error("polytope needs at least dim+1 affinely independent vertices: {0}")]
    DegenerateVertices(String),
    #[error("bodies must share the same direction grid")]
    GridMismatch,
    #[error("combination weight must lie in [0, 1], got {0}")]
    WeightOutOfRange(f64),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("homothety fit is numerically degenerate: {0}")]
    DegenerateFit(String),
    #[error("support values describe an empty body (min width {0} <= 0)")]
    EmptyBody(f64),
    #[error(
        "cell size {cell_size} too coarse for this body ({detail}); \
         refine to at most {max_allowed}"
    )]
    CellsTooCoarse {
        cell_size: f64,
        max_allowed: f64,
        detail: String,
    },
    #[error("rasterization produced {count} nodes, exceeding the cap {cap} \
             (dense kernel memory; use a coarser cell size)")]
    TooManyNodes { count: usize, cap: usize },
    #[error("body file line {line}: {message}")]
    BodyFile { line: usize, message: String },
}
