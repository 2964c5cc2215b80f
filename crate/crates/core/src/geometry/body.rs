use std::sync::Arc;

use super::grid::DirectionGrid;
use super::{dot, hull2, norm, sub, GeometryError, Point};

/// Exact shape information retained alongside the sampled support values.
/// Combinations of unlike shapes drop the descriptor and fall back to the
/// sampled representation.
#[derive(Debug, Clone)]
pub enum Descriptor {
    Ball {
        center: Point,
        radius: f64,
    },
    /// For planar bodies the vertices are the counter-clockwise hull;
    /// spatial polytopes keep the deduplicated input vertices.
    Polytope {
        vertices: Vec<Point>,
    },
}

/// Convex body sampled on a shared [`DirectionGrid`].
///
/// `support_values()[i]` is `sup_{x in K} <x, theta_i>`.  For bodies without
/// a descriptor, membership tests use the half-space intersection of the
/// sampled support, which is an outer approximation of the represented body.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    grid: Arc<DirectionGrid>,
    support: Vec<f64>,
    descriptor: Option<Descriptor>,
}

impl ConvexBody {
    /// Euclidean ball. `center` must have a zero third coordinate for
    /// planar grids; `radius` must be positive.
    pub fn ball(
        center: Point,
        radius: f64,
        grid: &Arc<DirectionGrid>,
    ) -> Result<Self, GeometryError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        check_point_dim(center, grid.dim())?;
        let support = grid
            .dirs()
            .iter()
            .map(|&d| dot(center, d) + radius)
            .collect();
        Ok(Self {
            grid: Arc::clone(grid),
            support,
            descriptor: Some(Descriptor::Ball { center, radius }),
        })
    }

    /// Convex hull of a vertex set.  Rejects degenerate (lower-dimensional)
    /// input; needs at least `dim + 1` affinely independent vertices.
    pub fn polytope(
        vertices: &[Point],
        grid: &Arc<DirectionGrid>,
    ) -> Result<Self, GeometryError> {
        let dim = grid.dim();
        if vertices.len() < dim + 1 {
            return Err(GeometryError::DegenerateVertices(format!(
                "{} vertices given, need at least {}",
                vertices.len(),
                dim + 1
            )));
        }
        for &v in vertices {
            check_point_dim(v, dim)?;
        }
        if affine_rank(vertices) < dim {
            return Err(GeometryError::DegenerateVertices(
                "vertices span a lower-dimensional set".into(),
            ));
        }
        let kept: Vec<Point> = if dim == 2 {
            let flat: Vec<[f64; 2]> = vertices.iter().map(|v| [v[0], v[1]]).collect();
            let hull = hull2::convex_hull(&flat);
            if hull.len() < 3 || hull2::polygon_area(&hull) <= 0.0 {
                return Err(GeometryError::DegenerateVertices(
                    "hull has empty interior".into(),
                ));
            }
            hull.into_iter().map(|v| [v[0], v[1], 0.0]).collect()
        } else {
            let mut kept = vertices.to_vec();
            kept.dedup_by(|a, b| a == b);
            kept
        };
        let support = grid
            .dirs()
            .iter()
            .map(|&d| {
                kept.iter()
                    .map(|&v| dot(v, d))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        Ok(Self {
            grid: Arc::clone(grid),
            support,
            descriptor: Some(Descriptor::Polytope { vertices: kept }),
        })
    }

    /// Body from raw support values (used by the body-file loader).  The
    /// values must describe a body with nonempty interior; convexity of the
    /// input is the caller's responsibility and the body is interpreted as
    /// the intersection of the sampled half-spaces.
    pub fn from_support(
        support: Vec<f64>,
        grid: &Arc<DirectionGrid>,
    ) -> Result<Self, GeometryError> {
        if support.len() != grid.len() {
            return Err(GeometryError::DimensionMismatch(format!(
                "{} support values for {} directions",
                support.len(),
                grid.len()
            )));
        }
        let body = Self {
            grid: Arc::clone(grid),
            support,
            descriptor: None,
        };
        let w = body.min_width();
        if !(w > 0.0) {
            return Err(GeometryError::EmptyBody(w));
        }
        Ok(body)
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn support_values(&self) -> &[f64] {
        &self.support
    }

    pub fn descriptor(&self) -> Option<&Descriptor> {
        self.descriptor.as_ref()
    }

    /// Scaled and translated copy `rho * K + xi`; support transforms as
    /// `h'(theta) = rho h(theta) + <xi, theta>`, exactly.
    pub fn scale_translate(&self, rho: f64, xi: Point) -> Result<Self, GeometryError> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(GeometryError::NonPositiveScale(rho));
        }
        check_point_dim(xi, self.dim())?;
        let support = self
            .grid
            .dirs()
            .iter()
            .zip(&self.support)
            .map(|(&d, &h)| rho * h + dot(xi, d))
            .collect();
        let descriptor = self.descriptor.as_ref().map(|desc| match desc {
            Descriptor::Ball { center, radius } => Descriptor::Ball {
                center: affine(*center, rho, xi),
                radius: rho * radius,
            },
            Descriptor::Polytope { vertices } => Descriptor::Polytope {
                vertices: vertices.iter().map(|&v| affine(v, rho, xi)).collect(),
            },
        });
        Ok(Self {
            grid: Arc::clone(&self.grid),
            support,
            descriptor,
        })
    }

    /// Membership test.  Exact for balls and planar polytopes via their
    /// descriptors; otherwise the sampled half-space test, which accepts an
    /// outer approximation of the represented body.
    pub fn contains_point(&self, p: Point) -> bool {
        match &self.descriptor {
            Some(Descriptor::Ball { center, radius }) => norm(sub(p, *center)) <= *radius,
            Some(Descriptor::Polytope { vertices }) if self.dim() == 2 => {
                let poly: Vec<[f64; 2]> = vertices.iter().map(|v| [v[0], v[1]]).collect();
                let scale = 1.0 + poly.iter().fold(norm(p), |m, v| m.max(v[0].abs().max(v[1].abs())));
                hull2::polygon_contains(&poly, [p[0], p[1]], 1e-12 * scale * scale)
            }
            _ => {
                let tol = 1e-12 * (1.0 + self.support_scale());
                self.grid
                    .dirs()
                    .iter()
                    .zip(&self.support)
                    .all(|(&d, &h)| dot(p, d) <= h + tol)
            }
        }
    }

    /// Inclusion test on the sampled representation: `self` is a subset of
    /// `other` iff every support value is smaller within an absolute 1e-12
    /// slack (scaled by the support magnitude).  Requires equal grids.
    pub fn is_subset(&self, other: &Self) -> Result<bool, GeometryError> {
        self.check_same_grid(other)?;
        let tol = 1e-12 * (1.0 + self.support_scale().max(other.support_scale()));
        Ok(self
            .support
            .iter()
            .zip(&other.support)
            .all(|(a, b)| *a <= *b + tol))
    }

    /// Minimal width over the sampled antipodal direction pairs.
    pub fn min_width(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| self.support[i] + self.support[self.grid.antipode(i)])
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn support_scale(&self) -> f64 {
        self.support.iter().fold(0.0_f64, |m, h| m.max(h.abs()))
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<(), GeometryError> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.as_ref() == other.grid.as_ref() {
            Ok(())
        } else {
            Err(GeometryError::GridMismatch)
        }
    }

    /// Vertices of the polygon cut out by consecutive sampled half-spaces
    /// (planar bodies only).  This is the exact boundary of the outer
    /// approximation used by sampled membership tests.
    pub fn outer_polygon(&self) -> Vec<[f64; 2]> {
        assert_eq!(self.dim(), 2, "outer_polygon is planar only");
        let n = self.grid.len();
        let dirs = self.grid.dirs();
        let mut verts = Vec::with_capacity(n);
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (dirs[i], dirs[j]);
            let (ha, hb) = (self.support[i], self.support[j]);
            let det = a[0] * b[1] - a[1] * b[0];
            verts.push([(ha * b[1] - hb * a[1]) / det, (a[0] * hb - b[0] * ha) / det]);
        }
        verts
    }

    /// Axis-aligned bounding box of the body (outer approximation for
    /// sampled bodies).  Returns `(lo, hi)` with `dim` meaningful entries.
    pub fn bounding_box(&self) -> (Point, Point) {
        match &self.descriptor {
            Some(Descriptor::Ball { center, radius }) => {
                let mut lo = [0.0; 3];
                let mut hi = [0.0; 3];
                for k in 0..self.dim() {
                    lo[k] = center[k] - radius;
                    hi[k] = center[k] + radius;
                }
                (lo, hi)
            }
            Some(Descriptor::Polytope { vertices }) => {
                let mut lo = [f64::INFINITY; 3];
                let mut hi = [f64::NEG_INFINITY; 3];
                for v in vertices {
                    for k in 0..3 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                for k in self.dim()..3 {
                    lo[k] = 0.0;
                    hi[k] = 0.0;
                }
                (lo, hi)
            }
            None => {
                if self.dim() == 2 {
                    let mut lo = [f64::INFINITY, f64::INFINITY, 0.0];
                    let mut hi = [f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0];
                    for v in self.outer_polygon() {
                        lo[0] = lo[0].min(v[0]);
                        hi[0] = hi[0].max(v[0]);
                        lo[1] = lo[1].min(v[1]);
                        hi[1] = hi[1].max(v[1]);
                    }
                    (lo, hi)
                } else {
                    // Coarse but safe: the sampled intersection can bulge
                    // past max h(theta) between directions by a covering
                    // factor; 5 percent covers the 512-point default.
                    let r = 1.05 * self.support_scale();
                    ([-r, -r, -r], [r, r, r])
                }
            }
        }
    }

    /// Upper estimate of `max_{x in K} |x - c|`.
    pub fn outer_radius_about(&self, c: Point) -> f64 {
        match &self.descriptor {
            Some(Descriptor::Ball { center, radius }) => norm(sub(*center, c)) + radius,
            Some(Descriptor::Polytope { vertices }) => vertices
                .iter()
                .map(|&v| norm(sub(v, c)))
                .fold(0.0, f64::max),
            None => {
                if self.dim() == 2 {
                    self.outer_polygon()
                        .iter()
                        .map(|v| norm(sub([v[0], v[1], 0.0], c)))
                        .fold(0.0, f64::max)
                } else {
                    let shifted = self
                        .grid
                        .dirs()
                        .iter()
                        .zip(&self.support)
                        .map(|(&d, &h)| h - dot(c, d))
                        .fold(0.0_f64, f64::max);
                    1.05 * shifted
                }
            }
        }
    }
}

/// Minkowski combination `lambda * a + (1 - lambda) * b`; support values are
/// exactly the pointwise convex combination.  The descriptor survives only
/// when both inputs are balls.
pub fn minkowski_combine(
    lambda: f64,
    a: &ConvexBody,
    b: &ConvexBody,
) -> Result<ConvexBody, GeometryError> {
    if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
        return Err(GeometryError::WeightOutOfRange(lambda));
    }
    a.check_same_grid(b)?;
    let support = a
        .support
        .iter()
        .zip(&b.support)
        .map(|(&ha, &hb)| lambda * ha + (1.0 - lambda) * hb)
        .collect();
    let descriptor = match (&a.descriptor, &b.descriptor) {
        (
            Some(Descriptor::Ball {
                center: ca,
                radius: ra,
            }),
            Some(Descriptor::Ball {
                center: cb,
                radius: rb,
            }),
        ) => Some(Descriptor::Ball {
            center: [
                lambda * ca[0] + (1.0 - lambda) * cb[0],
                lambda * ca[1] + (1.0 - lambda) * cb[1],
                lambda * ca[2] + (1.0 - lambda) * cb[2],
            ],
            radius: lambda * ra + (1.0 - lambda) * rb,
        }),
        _ => None,
    };
    Ok(ConvexBody {
        grid: Arc::clone(&a.grid),
        support,
        descriptor,
    })
}

fn affine(v: Point, rho: f64, xi: Point) -> Point {
    [
        rho * v[0] + xi[0],
        rho * v[1] + xi[1],
        rho * v[2] + xi[2],
    ]
}

fn check_point_dim(p: Point, dim: usize) -> Result<(), GeometryError> {
    if dim == 2 && p[2] != 0.0 {
        return Err(GeometryError::DimensionMismatch(format!(
            "point {p:?} has a nonzero third coordinate on a planar grid"
        )));
    }
    if p.iter().any(|c| !c.is_finite()) {
        return Err(GeometryError::DimensionMismatch(format!(
            "point {p:?} has non-finite coordinates"
        )));
    }
    Ok(())
}

/// Dimension of the affine span of a point set.
fn affine_rank(points: &[Point]) -> usize {
    let origin = points[0];
    let mut basis: Vec<Point> = Vec::new();
    let scale = points
        .iter()
        .map(|&p| norm(sub(p, origin)))
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    for &p in &points[1..] {
        let mut v = sub(p, origin);
        for b in &basis {
            let proj = dot(v, *b);
            v = [v[0] - proj * b[0], v[1] - proj * b[1], v[2] - proj * b[2]];
        }
        let n = norm(v);
        if n > 1e-10 * scale {
            basis.push([v[0] / n, v[1] / n, v[2] / n]);
            if basis.len() == 3 {
                break;
            }
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::super::pt2;
    use super::*;

    fn grid2() -> Arc<DirectionGrid> {
        Arc::new(DirectionGrid::uniform(2, 256).unwrap())
    }

    fn unit_square(grid: &Arc<DirectionGrid>) -> ConvexBody {
        ConvexBody::polytope(
            &[pt2(-1.0, -1.0), pt2(1.0, -1.0), pt2(1.0, 1.0), pt2(-1.0, 1.0)],
            grid,
        )
        .unwrap()
    }

    #[test]
    fn ball_support_is_affine_in_direction() {
        let g = grid2();
        let b = ConvexBody::ball(pt2(1.0, 0.0), 2.0, &g).unwrap();
        for (d, h) in g.dirs().iter().zip(b.support_values()) {
            assert!((h - (d[0] + 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_rejects_nonpositive_radius() {
        let g = grid2();
        assert!(ConvexBody::ball(pt2(0.0, 0.0), 0.0, &g).is_err());
        assert!(ConvexBody::ball(pt2(0.0, 0.0), -1.0, &g).is_err());
    }

    #[test]
    fn square_support_takes_vertex_maxima() {
        let g = grid2();
        let sq = unit_square(&g);
        for (d, h) in g.dirs().iter().zip(sq.support_values()) {
            let expect = d[0].abs() + d[1].abs();
            assert!((h - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn collinear_vertices_are_degenerate() {
        let g = grid2();
        let res = ConvexBody::polytope(&[pt2(0.0, 0.0), pt2(1.0, 1.0), pt2(2.0, 2.0)], &g);
        assert!(res.is_err());
    }

    #[test]
    fn combine_is_pointwise_affine() {
        let g = grid2();
        let b1 = ConvexBody::ball(pt2(0.0, 0.0), 1.0, &g).unwrap();
        let b2 = unit_square(&g);
        let lam = 0.3;
        let c = minkowski_combine(lam, &b1, &b2).unwrap();
        for i in 0..g.len() {
            let expect = lam * b1.support_values()[i] + (1.0 - lam) * b2.support_values()[i];
            assert_eq!(c.support_values()[i], expect);
        }
        assert!(minkowski_combine(1.5, &b1, &b2).is_err());
    }

    #[test]
    fn combine_of_balls_is_ball() {
        let g = grid2();
        let b1 = ConvexBody::ball(pt2(0.0, 0.0), 1.0, &g).unwrap();
        let b2 = ConvexBody::ball(pt2(2.0, 0.0), 3.0, &g).unwrap();
        let c = minkowski_combine(0.25, &b1, &b2).unwrap();
        match c.descriptor() {
            Some(Descriptor::Ball { center, radius }) => {
                assert!((center[0] - 1.5).abs() < 1e-12);
                assert!((radius - 2.5).abs() < 1e-12);
            }
            other => panic!("expected ball descriptor, got {other:?}"),
        }
    }

    #[test]
    fn scale_translate_moves_support() {
        let g = grid2();
        let b = ConvexBody::ball(pt2(0.0, 0.0), 1.0, &g).unwrap();
        let m = b.scale_translate(2.0, pt2(3.0, -1.0)).unwrap();
        for (d, h) in g.dirs().iter().zip(m.support_values()) {
            let expect = 2.0 + 3.0 * d[0] - d[1];
            assert!((h - expect).abs() < 1e-12);
        }
        assert!(b.scale_translate(0.0, pt2(0.0, 0.0)).is_err());
    }

    #[test]
    fn membership_square_boundary() {
        let g = grid2();
        let sq = unit_square(&g);
        assert!(sq.contains_point(pt2(1.0, 0.0)));
        assert!(!sq.contains_point(pt2(1.0001, 0.0)));
        assert!(sq.contains_point(pt2(0.0, 0.0)));
        assert!(!sq.contains_point(pt2(1.0001, 1.0001)));
    }

    #[test]
    fn membership_ball_is_metric() {
        let g = grid2();
        let b = ConvexBody::ball(pt2(1.0, 1.0), 0.5, &g).unwrap();
        assert!(b.contains_point(pt2(1.0, 1.5)));
        assert!(!b.contains_point(pt2(1.0, 1.5001)));
    }

    #[test]
    fn subset_examples() {
        let g = grid2();
        let b1 = ConvexBody::ball(pt2(0.0, 0.0), 1.0, &g).unwrap();
        let sq = unit_square(&g);
        let b2 = ConvexBody::ball(pt2(0.0, 0.0), 2.0_f64.sqrt(), &g).unwrap();
        assert!(b1.is_subset(&sq).unwrap());
        assert!(sq.is_subset(&b2).unwrap());
        assert!(!sq.is_subset(&b1).unwrap());
        assert!(b1.is_subset(&b1).unwrap());
    }

    #[test]
    fn different_grids_do_not_mix() {
        let g1 = grid2();
        let g2 = Arc::new(DirectionGrid::uniform(2, 128).unwrap());
        let a = ConvexBody::ball(pt2(0.0, 0.0), 1.0, &g1).unwrap();
        let b = ConvexBody::ball(pt2(0.0, 0.0), 1.0, &g2).unwrap();
        assert!(matches!(
            minkowski_combine(0.5, &a, &b),
            Err(GeometryError::GridMismatch)
        ));
    }

    #[test]
    fn bounding_box_of_shifted_ball() {
        let g = grid2();
        let b = ConvexBody::ball(pt2(1.0, -2.0), 0.5, &g).unwrap();
        let (lo, hi) = b.bounding_box();
        assert!((lo[0] - 0.5).abs() < 1e-12 && (hi[0] - 1.5).abs() < 1e-12);
        assert!((lo[1] + 2.5).abs() < 1e-12 && (hi[1] + 1.5).abs() < 1e-12);
    }

    #[test]
    fn outer_polygon_tracks_support() {
        let g = grid2();
        let b = ConvexBody::ball(pt2(0.0, 0.0), 1.0, &g).unwrap();
        // Ball of radius 1: every cut vertex sits just outside the circle.
        for v in ConvexBody::from_support(b.support_values().to_vec(), &g)
            .unwrap()
            .outer_polygon()
        {
            let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
            assert!(r >= 1.0 - 1e-12 && r < 1.001);
        }
    }

    #[test]
    fn min_width_of_square_is_two() {
        let g = grid2();
        let sq = unit_square(&g);
        assert!((sq.min_width() - 2.0).abs() < 1e-12);
    }
}
