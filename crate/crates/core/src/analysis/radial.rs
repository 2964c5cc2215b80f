//! Directional spread of the potential on circles around a center; a
//! radial field has zero spread, and equilibrium potentials approach
//! radiality away from the body.

use serde::Serialize;

use crate::solver::{eval_potential_at, EquilibriumSolution};

use super::AnalysisError;

#[derive(Debug, Clone, Serialize)]
pub struct RadialityRow {
    pub radius: f64,
    pub mean: f64,
    /// `(max - min) / mean` of the potential over the direction ring.
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialityReport {
    pub center: [f64; 2],
    pub directions: usize,
    pub rows: Vec<RadialityRow>,
    pub max_spread: f64,
}

/// Sample the potential on rings of the given radii about `center` and
/// report the relative spread per ring.  Radii must clear the charge
/// support.
pub fn radiality_test(
    sol: &EquilibriumSolution,
    center: [f64; 2],
    radii: &[f64],
    directions: usize,
) -> Result<RadialityReport, AnalysisError> {
    if radii.is_empty() || directions < 4 {
        return Err(AnalysisError::EmptyRegion(
            "need at least one radius and four directions".into(),
        ));
    }
    let q = sol.quadrature();
    let extent = q
        .nodes()
        .iter()
        .map(|n| {
            let dx = n[0] - center[0];
            let dy = n[1] - center[1];
            (dx * dx + dy * dy).sqrt()
        })
        .fold(0.0_f64, f64::max)
        + 0.5 * q.cell_size();

    let mut rows = Vec::with_capacity(radii.len());
    let mut max_spread = 0.0_f64;
    for &radius in radii {
        if !(radius > extent) {
            return Err(AnalysisError::RadiusInsideBody { radius, extent });
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for k in 0..directions {
            let phi = std::f64::consts::TAU * k as f64 / directions as f64;
            let v = eval_potential_at(
                sol,
                [
                    center[0] + radius * phi.cos(),
                    center[1] + radius * phi.sin(),
                    0.0,
                ],
            );
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        let mean = sum / directions as f64;
        let spread = (hi - lo) / mean;
        max_spread = max_spread.max(spread);
        rows.push(RadialityRow {
            radius,
            mean,
            spread,
        });
    }

    Ok(RadialityReport {
        center,
        directions,
        rows,
        max_spread,
    })
}
