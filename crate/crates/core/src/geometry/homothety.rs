use super::body::ConvexBody;
use super::{GeometryError, Point};

/// Relative residual below which two bodies are reported as homothetic.
pub const HOMOTHETY_REL_TOL: f64 = 1e-3;

/// Best affine match `a ~ rho * b + xi` in the support representation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HomothetyFit {
    pub rho: f64,
    pub xi: Point,
    /// Root mean square support misfit.
    pub residual: f64,
    /// `residual` divided by the support magnitude of `a`.
    pub residual_rel: f64,
    /// Set when the unconstrained scale came out nonpositive and the
    /// translation was refit with the scale pinned to a tiny value.
    pub constrained: bool,
}

impl HomothetyFit {
    pub fn is_homothety(&self) -> bool {
        !self.constrained && self.residual_rel <= HOMOTHETY_REL_TOL
    }
}

/// Least squares fit of scale and translation between two support samplings
/// on the same grid.  Support functions satisfy
/// `h_{rho K + xi}(theta) = rho h_K(theta) + <xi, theta>`, so a homothetic
/// pair fits with zero residual up to rounding.
pub fn detect_homothety(a: &ConvexBody, b: &ConvexBody) -> Result<HomothetyFit, GeometryError> {
    a.check_same_grid(b)?;
    let dim = a.dim();
    let dirs = a.grid().dirs();
    let (ha, hb) = (a.support_values(), b.support_values());
    let n = dirs.len();
    if n < dim + 2 {
        return Err(GeometryError::DegenerateFit(format!(
            "{n} directions cannot determine scale and translation"
        )));
    }

    // Normal equations for unknowns (rho, xi_0 .. xi_{dim-1}).
    let cols = dim + 1;
    let mut m = vec![0.0_f64; cols * cols];
    let mut rhs = vec![0.0_f64; cols];
    for i in 0..n {
        let mut row = [0.0_f64; 4];
        row[0] = hb[i];
        for k in 0..dim {
            row[k + 1] = dirs[i][k];
        }
        for r in 0..cols {
            for c in 0..cols {
                m[r * cols + c] += row[r] * row[c];
            }
            rhs[r] += row[r] * ha[i];
        }
    }

    let scale_b = b.support_scale().max(1e-300);
    let sol = solve_spd(cols, &mut m, &mut rhs, 1e-13 * scale_b * scale_b)?;
    let mut rho = sol[0];
    let mut xi = [0.0; 3];
    xi[..dim].copy_from_slice(&sol[1..cols]);

    let mut constrained = false;
    if !(rho > 0.0) {
        // Nonpositive scale never describes a homothety of convex bodies;
        // pin it and keep the best translation so the residual is honest.
        constrained = true;
        rho = 1e-12;
        for k in 0..dim {
            let num: f64 = (0..n).map(|i| (ha[i] - rho * hb[i]) * dirs[i][k]).sum();
            let den: f64 = (0..n).map(|i| dirs[i][k] * dirs[i][k]).sum();
            xi[k] = num / den;
        }
    }

    let mut sq = 0.0;
    for i in 0..n {
        let mut fit = rho * hb[i];
        for k in 0..dim {
            fit += xi[k] * dirs[i][k];
        }
        let d = fit - ha[i];
        sq += d * d;
    }
    let residual = (sq / n as f64).sqrt();
    let residual_rel = residual / a.support_scale().max(1e-300);
    Ok(HomothetyFit {
        rho,
        xi,
        residual,
        residual_rel,
        constrained,
    })
}

/// Gaussian elimination with partial pivoting for the small normal systems
/// used here (at most 4 by 4).  Destroys its inputs.
fn solve_spd(
    n: usize,
    m: &mut [f64],
    rhs: &mut [f64],
    pivot_floor: f64,
) -> Result<Vec<f64>, GeometryError> {
    for col in 0..n {
        let mut best = col;
        for r in col + 1..n {
            if m[r * n + col].abs() > m[best * n + col].abs() {
                best = r;
            }
        }
        if m[best * n + col].abs() <= pivot_floor {
            return Err(GeometryError::DegenerateFit(
                "normal matrix is singular".into(),
            ));
        }
        if best != col {
            for c in 0..n {
                m.swap(col * n + c, best * n + c);
            }
            rhs.swap(col, best);
        }
        let piv = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / piv;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r * n + c] -= f * m[col * n + c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut v = rhs[col];
        for c in col + 1..n {
            v -= m[col * n + c] * x[c];
        }
        x[col] = v / m[col * n + col];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::grid::DirectionGrid;
    use super::super::pt2;
    use super::*;

    fn grid2() -> Arc<DirectionGrid> {
        Arc::new(DirectionGrid::uniform(2, 256).unwrap())
    }

    #[test]
    fn exact_round_trip() {
        let g = grid2();
        let sq = ConvexBody::polytope(
            &[pt2(-1.0, -0.5), pt2(1.2, -0.5), pt2(1.2, 0.8), pt2(-1.0, 0.8)],
            &g,
        )
        .unwrap();
        let moved = sq.scale_translate(2.5, pt2(0.7, -3.1)).unwrap();
        let fit = detect_homothety(&moved, &sq).unwrap();
        assert!((fit.rho - 2.5).abs() < 1e-10, "rho = {}", fit.rho);
        assert!((fit.xi[0] - 0.7).abs() < 1e-10);
        assert!((fit.xi[1] + 3.1).abs() < 1e-10);
        assert!(fit.residual_rel < 1e-12);
        assert!(fit.is_homothety());
    }

    #[test]
    fn disk_vs_square_is_not_homothetic() {
        let g = grid2();
        let disk = ConvexBody::ball(pt2(0.0, 0.0), 1.0, &g).unwrap();
        let sq = ConvexBody::polytope(
            &[pt2(-1.0, -1.0), pt2(1.0, -1.0), pt2(1.0, 1.0), pt2(-1.0, 1.0)],
            &g,
        )
        .unwrap();
        let fit = detect_homothety(&disk, &sq).unwrap();
        assert!(!fit.is_homothety(), "residual_rel = {}", fit.residual_rel);
        assert!(fit.residual_rel > 0.01);
    }

    #[test]
    fn spatial_balls_fit_exactly() {
        let g = Arc::new(DirectionGrid::uniform(3, 512).unwrap());
        let b1 = ConvexBody::ball([0.2, -0.4, 0.9], 1.7, &g).unwrap();
        let b2 = ConvexBody::ball([0.0, 0.0, 0.0], 1.0, &g).unwrap();
        let fit = detect_homothety(&b1, &b2).unwrap();
        assert!((fit.rho - 1.7).abs() < 1e-9);
        assert!((fit.xi[0] - 0.2).abs() < 1e-9);
        assert!((fit.xi[1] + 0.4).abs() < 1e-9);
        assert!((fit.xi[2] - 0.9).abs() < 1e-9);
        assert!(fit.is_homothety());
    }
}
