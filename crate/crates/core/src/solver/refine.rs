use serde::Serialize;

use crate::geometry::ConvexBody;

use super::capacity::{capacity_with, CapacityParams};
use super::kernel::KernelSpec;
use super::SolverError;

#[derive(Debug, Clone, Serialize)]
pub struct RefineRow {
    pub cell_size: f64,
    pub mass: f64,
    pub asymptotic: f64,
    pub discrepancy: f64,
}

/// Resolution ladder for one body: per-level capacities, the empirical
/// convergence order of the mass estimate, its Richardson limit, and an
/// error bar for downstream inequality tests.
#[derive(Debug, Clone, Serialize)]
pub struct RefineStudy {
    pub rows: Vec<RefineRow>,
    /// Empirical order from the last three levels; absent when the ladder
    /// is not monotone there.
    pub order: Option<f64>,
    pub extrapolated: f64,
    /// Two times the distance from the finest level to the extrapolated
    /// value (a deliberately conservative bound); when no order could be
    /// fit, twice the last increment.
    pub error_bar: f64,
    pub monotone: bool,
}

impl RefineStudy {
    pub fn finest(&self) -> &RefineRow {
        self.rows.last().expect("ladder has at least three rows")
    }
}

/// Richardson limit of a scalar sequence sampled on a decreasing ladder.
#[derive(Debug, Clone, Serialize)]
pub struct Extrapolation {
    pub extrapolated: f64,
    pub error_bar: f64,
    pub order: Option<f64>,
    pub monotone: bool,
}

/// Extrapolate the last three rungs of `values` to zero cell size.
///
/// The order fit is trusted only when the increments decay and the implied
/// correction stays within three last increments; oscillating or stalled
/// sequences fall back to the finest value with twice the last increment as
/// the bar. That guard matters for quadrature error that mixes a smooth
/// power law with lattice-alignment noise: a noise-contaminated order fit
/// can otherwise extrapolate far past the limit.
pub fn extrapolate_values(
    cell_sizes: &[f64],
    values: &[f64],
) -> Result<Extrapolation, SolverError> {
    if cell_sizes.len() < 3 || cell_sizes.len() != values.len() {
        return Err(SolverError::BadLadder(format!(
            "{} cell sizes against {} values, need at least 3 matched pairs",
            cell_sizes.len(),
            values.len()
        )));
    }
    if cell_sizes.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(SolverError::BadLadder(
            "cell sizes must be strictly decreasing".into(),
        ));
    }
    let k = values.len();
    let (h1, h2, h3) = (cell_sizes[k - 3], cell_sizes[k - 2], cell_sizes[k - 1]);
    let (c1, c2, c3) = (values[k - 3], values[k - 2], values[k - 1]);
    let d12 = c1 - c2;
    let d23 = c2 - c3;

    let scale = c3.abs().max(c2.abs()).max(1e-300);
    let fallback = |monotone: bool| Extrapolation {
        extrapolated: c3,
        error_bar: 2.0 * d23.abs().max(f64::EPSILON * scale),
        order: None,
        monotone,
    };

    if d12 * d23 <= 0.0 || d23.abs() < 1e-15 * scale {
        return Ok(fallback(false));
    }

    match fit_order(h1, h2, h3, d12 / d23) {
        Some(p) => {
            let lever = h3.powf(p) / (h2.powf(p) - h3.powf(p));
            let c_star = c3 - d23 * lever;
            if (c_star - c3).abs() > 3.0 * d23.abs() {
                return Ok(fallback(true));
            }
            Ok(Extrapolation {
                extrapolated: c_star,
                error_bar: 2.0 * (c3 - c_star).abs().max(f64::EPSILON * scale),
                order: Some(p),
                monotone: true,
            })
        }
        None => Ok(fallback(true)),
    }
}

/// Run `capacity` over strictly decreasing cell sizes and extrapolate.
pub fn refine_study(
    body: &ConvexBody,
    cell_sizes: &[f64],
    spec: &KernelSpec,
) -> Result<RefineStudy, SolverError> {
    refine_study_with(body, cell_sizes, spec, &CapacityParams::default())
}

pub fn refine_study_with(
    body: &ConvexBody,
    cell_sizes: &[f64],
    spec: &KernelSpec,
    params: &CapacityParams,
) -> Result<RefineStudy, SolverError> {
    if cell_sizes.len() < 3 {
        return Err(SolverError::BadLadder(format!(
            "{} cell sizes given, need at least 3",
            cell_sizes.len()
        )));
    }
    if cell_sizes.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(SolverError::BadLadder(
            "cell sizes must be strictly decreasing".into(),
        ));
    }
    let mut rows = Vec::with_capacity(cell_sizes.len());
    for &h in cell_sizes {
        let est = capacity_with(body, h, spec, params)?;
        rows.push(RefineRow {
            cell_size: h,
            mass: est.mass,
            asymptotic: est.asymptotic,
            discrepancy: est.discrepancy,
        });
    }

    let masses: Vec<f64> = rows.iter().map(|r| r.mass).collect();
    let ex = extrapolate_values(cell_sizes, &masses)?;
    Ok(RefineStudy {
        extrapolated: ex.extrapolated,
        error_bar: ex.error_bar,
        order: ex.order,
        monotone: ex.monotone,
        rows,
    })
}

/// Solve `(h1^p - h2^p) / (h2^p - h3^p) = ratio` for the order `p` by
/// bisection; the left side is continuous in `p` for decreasing ladders.
fn fit_order(h1: f64, h2: f64, h3: f64, ratio: f64) -> Option<f64> {
    let f = |p: f64| (h1.powf(p) - h2.powf(p)) / (h2.powf(p) - h3.powf(p)) - ratio;
    let (mut lo, mut hi) = (0.02_f64, 6.0_f64);
    let (flo, fhi) = (f(lo), f(hi));
    if !flo.is_finite() || !fhi.is_finite() || flo * fhi > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_recovery_on_synthetic_ladder() {
        // c(h) = 1 + 0.3 h^1.5 sampled on a 2:1 ladder.
        let p_true = 1.5;
        let (h1, h2, h3) = (0.2, 0.1, 0.05);
        let c = |h: f64| 1.0 + 0.3 * h.powf(p_true);
        let ratio = (c(h1) - c(h2)) / (c(h2) - c(h3));
        let p = fit_order(h1, h2, h3, ratio).unwrap();
        assert!((p - p_true).abs() < 1e-6, "p = {p}");
    }

    #[test]
    fn sequence_extrapolation_recovers_clean_power_law() {
        let cells = [0.2_f64, 0.1, 0.05];
        let vals: Vec<f64> = cells.iter().map(|h| 1.0 + 0.3 * h.powf(1.5)).collect();
        let ex = extrapolate_values(&cells, &vals).unwrap();
        assert!((ex.extrapolated - 1.0).abs() < 1e-12);
        assert!((ex.order.unwrap() - 1.5).abs() < 1e-6);
        assert!(ex.monotone);
    }

    #[test]
    fn noisy_low_order_fit_falls_back_instead_of_overshooting() {
        // Slow apparent order on a gentle ladder implies a correction several
        // times the last increment; the guard must refuse that leap.
        let cells = [0.064, 0.052, 0.04];
        let vals = [0.641247, 0.640353, 0.639364];
        let ex = extrapolate_values(&cells, &vals).unwrap();
        assert_eq!(ex.order, None);
        assert_eq!(ex.extrapolated, vals[2]);
        let d23 = (vals[1] - vals[2]).abs();
        assert!((ex.error_bar - 2.0 * d23).abs() < 1e-12);
    }

    #[test]
    fn oscillating_sequence_reports_non_monotone() {
        let cells = [0.08, 0.056, 0.04];
        let vals = [0.640181, 0.640527, 0.639364];
        let ex = extrapolate_values(&cells, &vals).unwrap();
        assert!(!ex.monotone);
        assert_eq!(ex.extrapolated, vals[2]);
    }

    #[test]
    fn sequence_extrapolation_rejects_mismatched_input() {
        assert!(extrapolate_values(&[0.2, 0.1], &[1.0, 2.0]).is_err());
        assert!(extrapolate_values(&[0.2, 0.1, 0.1], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn order_fit_handles_uneven_ladders() {
        let p_true = 0.8;
        let (h1, h2, h3) = (0.1, 0.07, 0.03);
        let c = |h: f64| 2.0 - 0.5 * h.powf(p_true);
        let ratio = (c(h1) - c(h2)) / (c(h2) - c(h3));
        let p = fit_order(h1, h2, h3, ratio).unwrap();
        assert!((p - p_true).abs() < 1e-6, "p = {p}");
    }
}
