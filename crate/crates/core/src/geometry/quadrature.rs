use super::body::ConvexBody;
use super::{GeometryError, Point};

/// Hard ceiling on quadrature nodes; dense kernel matrices grow with the
/// square of this number.
pub const NODE_CAP: usize = 20_000;

/// Fewest cells considered a meaningful discretization.
const MIN_NODES: usize = 50;

/// Cells must resolve the body: at least this many across its minimal width.
const CELLS_ACROSS_WIDTH: f64 = 20.0;

/// Subsamples per axis for occupancy weights.
const OCC_SUBDIV: usize = 8;

/// How cell weights are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellWeighting {
    /// Full cell volume when the cell center lies in the body.
    CenterIn,
    /// Volume times the inside fraction of an 8-per-axis subsample;
    /// empty cells are dropped.  Cut cells place their node at the
    /// centroid of the covered part rather than the cell center, which
    /// removes the first-order placement bias along the boundary.
    Occupancy,
}

/// Cell-centered quadrature over a convex body.
///
/// The lattice is anchored at the low corner of the body's bounding box, so
/// translating a body translates the nodes with it (up to rounding) and a
/// translated body sees an identically shaped discretization.
#[derive(Debug, Clone)]
pub struct Quadrature {
    dim: usize,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    cell_size: f64,
}

impl Quadrature {
    pub fn rasterize(
        body: &ConvexBody,
        cell_size: f64,
        weighting: CellWeighting,
    ) -> Result<Self, GeometryError> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(GeometryError::CellsTooCoarse {
                cell_size,
                max_allowed: 0.0,
                detail: "cell size must be positive".into(),
            });
        }
        let dim = body.dim();
        let width = body.min_width();
        let max_allowed = width / CELLS_ACROSS_WIDTH;
        if cell_size > max_allowed {
            return Err(GeometryError::CellsTooCoarse {
                cell_size,
                max_allowed,
                detail: format!("body minimal width is {width:.6}"),
            });
        }

        let (lo, hi) = body.bounding_box();
        let mut counts = [1usize; 3];
        let mut estimate = 1usize;
        for k in 0..dim {
            let c = ((hi[k] - lo[k]) / cell_size).ceil().max(1.0) as usize;
            counts[k] = c;
            estimate = estimate.saturating_mul(c);
        }
        // A body fills a decent fraction of its box; refuse early rather
        // than walking an absurd lattice.
        if estimate > 40 * NODE_CAP {
            return Err(GeometryError::TooManyNodes {
                count: estimate,
                cap: NODE_CAP,
            });
        }

        let h = cell_size;
        let cell_volume = h.powi(dim as i32);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for iz in 0..counts[2] {
            for iy in 0..counts[1] {
                for ix in 0..counts[0] {
                    let center = [
                        lo[0] + (ix as f64 + 0.5) * h,
                        lo[1] + (iy as f64 + 0.5) * h,
                        if dim == 3 { lo[2] + (iz as f64 + 0.5) * h } else { 0.0 },
                    ];
                    let (node, w) = match weighting {
                        CellWeighting::CenterIn => {
                            if body.contains_point(center) {
                                (center, cell_volume)
                            } else {
                                continue;
                            }
                        }
                        CellWeighting::Occupancy => {
                            let (frac, centroid) =
                                occupancy_moments(body, center, h, dim);
                            if frac == 0.0 {
                                continue;
                            }
                            (centroid, frac * cell_volume)
                        }
                    };
                    nodes.push(node);
                    weights.push(w);
                    if nodes.len() > NODE_CAP {
                        return Err(GeometryError::TooManyNodes {
                            count: estimate,
                            cap: NODE_CAP,
                        });
                    }
                }
            }
        }
        if nodes.len() < MIN_NODES {
            return Err(GeometryError::CellsTooCoarse {
                cell_size,
                max_allowed,
                detail: format!("only {} occupied cells, need {MIN_NODES}", nodes.len()),
            });
        }
        Ok(Self {
            dim,
            nodes,
            weights,
            cell_size,
        })
    }

    /// Quadrature from explicit nodes and weights, trusting the caller's
    /// discretization (no occupancy or resolution checks).  Used for
    /// synthetic charge layouts and for cell sets extracted from other
    /// solvers' grids.
    pub fn from_nodes(
        dim: usize,
        nodes: Vec<Point>,
        weights: Vec<f64>,
        cell_size: f64,
    ) -> Result<Self, GeometryError> {
        if dim != 2 && dim != 3 {
            return Err(GeometryError::UnsupportedDimension(dim));
        }
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(GeometryError::DimensionMismatch(format!(
                "{} nodes with {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.len() > NODE_CAP {
            return Err(GeometryError::TooManyNodes {
                count: nodes.len(),
                cap: NODE_CAP,
            });
        }
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(GeometryError::CellsTooCoarse {
                cell_size,
                max_allowed: 0.0,
                detail: "cell size must be positive".into(),
            });
        }
        let bad = weights.iter().any(|w| !(*w > 0.0) || !w.is_finite())
            || nodes.iter().flatten().any(|c| !c.is_finite());
        if bad {
            return Err(GeometryError::DimensionMismatch(
                "nodes and weights must be finite, weights positive".into(),
            ));
        }
        Ok(Self {
            dim,
            nodes,
            weights,
            cell_size,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    /// Sum of weights, an approximation of the body's volume (exact cell
    /// tiling for center-in weighting of boxes).
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weight-averaged node position.
    pub fn weighted_centroid(&self) -> Point {
        let mut c = [0.0; 3];
        let mut total = 0.0;
        for (node, w) in self.nodes.iter().zip(&self.weights) {
            for k in 0..3 {
                c[k] += w * node[k];
            }
            total += w;
        }
        for v in &mut c {
            *v /= total;
        }
        c
    }
}

/// Inside fraction of a subsample lattice over one cell, together with the
/// centroid of the inside samples (the cell center when nothing is cut).
fn occupancy_moments(body: &ConvexBody, center: Point, h: f64, dim: usize) -> (f64, Point) {
    let sub = OCC_SUBDIV;
    let step = h / sub as f64;
    let base = [
        center[0] - 0.5 * h + 0.5 * step,
        center[1] - 0.5 * h + 0.5 * step,
        center[2] - 0.5 * h + 0.5 * step,
    ];
    let z_range = if dim == 3 { sub } else { 1 };
    let total = sub * sub * z_range;
    let mut inside = 0usize;
    let mut sum = [0.0_f64; 3];
    for kz in 0..z_range {
        for ky in 0..sub {
            for kx in 0..sub {
                let p = [
                    base[0] + kx as f64 * step,
                    base[1] + ky as f64 * step,
                    if dim == 3 { base[2] + kz as f64 * step } else { 0.0 },
                ];
                if body.contains_point(p) {
                    inside += 1;
                    sum[0] += p[0];
                    sum[1] += p[1];
                    sum[2] += p[2];
                }
            }
        }
    }
    if inside == 0 {
        return (0.0, center);
    }
    if inside == total {
        // The symmetric subsample averages back to the center exactly;
        // keep the center verbatim to avoid rounding drift.
        return (1.0, center);
    }
    let inv = 1.0 / inside as f64;
    let centroid = [
        sum[0] * inv,
        sum[1] * inv,
        if dim == 3 { sum[2] * inv } else { 0.0 },
    ];
    (inside as f64 / total as f64, centroid)
}
