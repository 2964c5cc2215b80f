use crate::geometry::DirectionGrid;

use super::equilibrium::EquilibriumSolution;
use super::potential::eval_potential_at;
use super::SolverError;

/// Far-field fit of the potential: per-shell means of `u(R theta) R^s`
/// and the intercept of a least-squares line in `1/R`.
#[derive(Debug, Clone)]
pub struct AsymptoticFit {
    /// Fitted limit of `u(x) |x|^s`, the capacity.
    pub value: f64,
    /// Coefficient of the `1/R` term (next multipole correction).
    pub slope: f64,
    /// `(radius, mean of u R^s over the direction set)` per shell.
    pub rows: Vec<(f64, f64)>,
    /// Largest relative spread of `u R^s` across directions on any shell;
    /// small values indicate the far field is already radial.
    pub direction_spread: f64,
}

/// Capacity from the far-field law `u(x) ~ cap / |x|^s`.
///
/// Shells are centered on the charge centroid, which cancels the dipole
/// term of the multipole expansion; the direction sets contain exact
/// antipodal pairs, cancelling all remaining odd terms, so the shell means
/// approach the limit at second order in `1/R`.
pub fn capacity_asymptotic(
    sol: &EquilibriumSolution,
    radii: &[f64],
    n_dirs: usize,
) -> Result<AsymptoticFit, SolverError> {
    if radii.len() < 3 {
        return Err(SolverError::BadRadii(format!(
            "{} radii given, need at least 3",
            radii.len()
        )));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SolverError::BadRadii("radii must be strictly increasing".into()));
    }
    let center = sol.charge_centroid();
    let q = sol.quadrature();
    let extent = q
        .nodes()
        .iter()
        .map(|n| {
            let dx = n[0] - center[0];
            let dy = n[1] - center[1];
            let dz = n[2] - center[2];
            (dx * dx + dy * dy + dz * dz).sqrt()
        })
        .fold(0.0_f64, f64::max)
        + 0.5 * q.cell_size();
    if radii[0] < 3.0 * extent {
        return Err(SolverError::BadRadii(format!(
            "smallest radius {} is inside 3x the charge extent {extent:.6}",
            radii[0]
        )));
    }
    let dirs = DirectionGrid::uniform(q.dim(), n_dirs).map_err(SolverError::Geometry)?;

    let s = sol.kernel().s();
    let mut rows = Vec::with_capacity(radii.len());
    let mut spread_max = 0.0_f64;
    for &radius in radii {
        let mut sum = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &d in dirs.dirs() {
            let p = [
                center[0] + radius * d[0],
                center[1] + radius * d[1],
                center[2] + radius * d[2],
            ];
            let v = eval_potential_at(sol, p) * radius.powf(s);
            sum += v;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let mean = sum / dirs.len() as f64;
        spread_max = spread_max.max((hi - lo) / mean.abs().max(f64::MIN_POSITIVE));
        rows.push((radius, mean));
    }

    // Least-squares line y = value + slope * (1/R).
    let n = rows.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(radius, y) in &rows {
        let x = 1.0 / radius;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let value = (sy - slope * sx) / n;
    Ok(AsymptoticFit {
        value,
        slope,
        rows,
        direction_spread: spread_max,
    })
}
