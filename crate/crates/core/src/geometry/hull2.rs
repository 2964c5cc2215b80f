//! Small planar convex-hull helpers (Andrew's monotone chain).

/// Cross product of (b - a) x (c - a).
#[inline]
pub fn cross(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Convex hull in counter-clockwise order, collinear points dropped.
/// Returns fewer than 3 points for degenerate input.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|p, q| {
        p[0].partial_cmp(&q[0])
            .unwrap()
            .then(p[1].partial_cmp(&q[1]).unwrap())
    });
    pts.dedup_by(|p, q| p[0] == q[0] && p[1] == q[1]);
    let n = pts.len();
    if n < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * n);
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Point-in-convex-polygon test; `poly` must be counter-clockwise.
/// Tolerance is absolute on the cross products, scaled by the caller.
pub fn polygon_contains(poly: &[[f64; 2]], p: [f64; 2], eps: f64) -> bool {
    let n = poly.len();
    if n == 0 {
        return false;
    }
    if n == 1 {
        return (poly[0][0] - p[0]).abs() <= eps && (poly[0][1] - p[1]).abs() <= eps;
    }
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if cross(a, b, p) < -eps {
            return false;
        }
    }
    true
}

/// Polygon area (positive for counter-clockwise orientation).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        acc += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_interior_points() {
        let pts = vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [0.5, 0.5],
            [0.25, 0.75],
            [0.5, 0.0], // collinear on an edge, must be dropped
        ];
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
        assert!((polygon_area(&hull) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn containment_matches_geometry() {
        let hull = convex_hull(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]]);
        assert!(polygon_contains(&hull, [1.0, 0.5], 1e-12));
        assert!(polygon_contains(&hull, [0.0, 0.0], 1e-9));
        assert!(!polygon_contains(&hull, [2.1, 0.5], 1e-12));
    }
}
