//! Super-level sets of the capacitary potential: extraction as convex
//! bodies, the reciprocal capacity-scaling law, homothety between two
//! levels, and the three-level inclusion test.

use std::sync::Arc;

use serde::Serialize;

use crate::geometry::{
    detect_homothety, minkowski_combine, ConvexBody, Descriptor, DirectionGrid, HomothetyFit,
    Point,
};
use crate::solver::{
    eval_potential, eval_potential_at, refine_study_with, solve_equilibrium_with, CapacityParams,
    EquilibriumSolution, KernelSpec,
};
use crate::Quadrature;

use super::AnalysisError;

/// Default probe lattice resolution (points per axis).
const PROBE_N: usize = 201;

/// Convex hull of the probe points where the potential reaches the level.
#[derive(Debug, Clone, Serialize)]
pub struct ExtractedLevel {
    pub level: f64,
    #[serde(skip)]
    pub body: ConvexBody,
    /// Fraction of probe points inside the hull whose potential actually
    /// reaches the level; 1 means the level set is convex at probe scale.
    pub convexity_score: f64,
    pub points_kept: usize,
    pub hull_vertices: usize,
    pub probe_half_width: f64,
}

/// Evaluate the potential on a centered probe lattice and hull the points
/// with `u >= t`.  The lattice half-width is auto-bracketed so the level
/// set stays strictly inside; reaching the boundary is an error.
pub fn level_set_extract(
    sol: &EquilibriumSolution,
    t: f64,
    probe_n: usize,
    grid: &Arc<DirectionGrid>,
) -> Result<ExtractedLevel, AnalysisError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(AnalysisError::BadLevel(t, "(0, 1)"));
    }
    if probe_n < 16 {
        return Err(AnalysisError::EmptyRegion(format!(
            "probe lattice {probe_n} per axis"
        )));
    }
    let center = sol.charge_centroid();
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

    // Grow the window until the potential is below the level on a ring of
    // test rays, then pad it.
    let mut half = 1.5 * extent;
    let rays = 64;
    for _ in 0..120 {
        let mut worst = 0.0_f64;
        for k in 0..rays {
            let phi = std::f64::consts::TAU * k as f64 / rays as f64;
            let p = [
                center[0] + half * phi.cos(),
                center[1] + half * phi.sin(),
                0.0,
            ];
            worst = worst.max(eval_potential_at(sol, p));
        }
        if worst < t {
            break;
        }
        half *= 1.3;
    }
    half *= 1.1;

    let step = 2.0 * half / (probe_n as f64 - 1.0);
    let mut points = Vec::with_capacity(probe_n * probe_n);
    for j in 0..probe_n {
        for i in 0..probe_n {
            points.push([
                center[0] - half + i as f64 * step,
                center[1] - half + j as f64 * step,
                0.0,
            ]);
        }
    }
    let values = eval_potential(sol, &points);

    let mut kept: Vec<Point> = Vec::new();
    for (idx, (&v, p)) in values.iter().zip(&points).enumerate() {
        if v < t {
            continue;
        }
        let (i, j) = (idx % probe_n, idx / probe_n);
        if i == 0 || j == 0 || i == probe_n - 1 || j == probe_n - 1 {
            return Err(AnalysisError::ProbeBoundary(format!(
                "u = {v:.4} >= {t} at lattice corner index ({i}, {j})"
            )));
        }
        kept.push(*p);
    }
    if kept.len() < 3 {
        return Err(AnalysisError::EmptyRegion(format!(
            "level {t} keeps only {} probe points",
            kept.len()
        )));
    }

    let body = ConvexBody::polytope(&kept, grid)?;

    let mut inside = 0usize;
    let mut agree = 0usize;
    for (&v, p) in values.iter().zip(&points) {
        if body.contains_point(*p) {
            inside += 1;
            if v >= t {
                agree += 1;
            }
        }
    }
    let convexity_score = if inside == 0 {
        0.0
    } else {
        agree as f64 / inside as f64
    };

    let hull_vertices = match body.descriptor() {
        Some(Descriptor::Polytope { vertices }) => vertices.len(),
        _ => 0,
    };
    Ok(ExtractedLevel {
        level: t,
        body,
        convexity_score,
        points_kept: kept.len(),
        hull_vertices,
        probe_half_width: half,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelScalingRow {
    pub t: f64,
    pub convexity_score: f64,
    /// Extrapolated capacity of the extracted level body.
    pub capacity: f64,
    pub capacity_bar: f64,
    /// `capacity * t / capacity(base)`; 1 under the reciprocal law.
    pub ratio: f64,
    pub ratio_bar: f64,
    pub cell_size: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelScalingReport {
    pub base_capacity: f64,
    pub base_bar: f64,
    pub rows: Vec<LevelScalingRow>,
    pub probe_n: usize,
}

fn base_solution(
    body: &ConvexBody,
    cell_size: f64,
    spec: &KernelSpec,
) -> Result<EquilibriumSolution, AnalysisError> {
    let params = CapacityParams::default();
    let q = Quadrature::rasterize(body, cell_size, params.weighting)?;
    Ok(solve_equilibrium_with(&q, spec, &params.solve)?)
}

// Gentle enough that the coarse rung stays under the rasterizer's
// cells-per-width ceiling even for level bodies a few times larger than
// the base body.
fn ladder_cells(cell_size: f64) -> Vec<f64> {
    vec![1.6 * cell_size, 1.25 * cell_size, cell_size]
}

fn body_radius(body: &ConvexBody) -> f64 {
    let bb = body.bounding_box();
    let center = [
        0.5 * (bb.0[0] + bb.1[0]),
        0.5 * (bb.0[1] + bb.1[1]),
        0.5 * (bb.0[2] + bb.1[2]),
    ];
    body.outer_radius_about(center)
}

/// Measure `cap(level body) * t / cap(body)` per level.  The reciprocal
/// law predicts 1; the deviation is reported, not asserted.
pub fn level_scaling_experiment(
    body: &ConvexBody,
    t_list: &[f64],
    cell_size: f64,
) -> Result<LevelScalingReport, AnalysisError> {
    if t_list.is_empty() {
        return Err(AnalysisError::EmptyRegion("no levels given".into()));
    }
    for &t in t_list {
        if !(t > 0.0 && t <= 0.6) {
            return Err(AnalysisError::BadLevel(t, "(0, 0.6]"));
        }
    }
    let spec = KernelSpec::half_fractional(body.dim())?;
    let params = CapacityParams::default();
    let cells = ladder_cells(cell_size);
    let base = refine_study_with(body, &cells, &spec, &params)?;
    let sol = base_solution(body, cell_size, &spec)?;
    let base_radius = body_radius(body);

    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let level = level_set_extract(&sol, t, PROBE_N, body.grid())?;
        // Matched relative resolution: scale the cell with the body.
        let scale = body_radius(&level.body) / base_radius;
        let level_cell = cell_size * scale;
        let study = refine_study_with(&level.body, &ladder_cells(level_cell), &spec, &params)?;

        let ratio = study.extrapolated * t / base.extrapolated;
        let ratio_bar = ratio
            * (study.error_bar / study.extrapolated + base.error_bar / base.extrapolated).abs();
        rows.push(LevelScalingRow {
            t,
            convexity_score: level.convexity_score,
            capacity: study.extrapolated,
            capacity_bar: study.error_bar,
            ratio,
            ratio_bar,
            cell_size: level_cell,
        });
    }

    Ok(LevelScalingReport {
        base_capacity: base.extrapolated,
        base_bar: base.error_bar,
        rows,
        probe_n: PROBE_N,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HomotheticLevelsReport {
    pub r: f64,
    pub s: f64,
    /// Fit of `level(r) ~ rho * level(s) + xi`.
    pub fit: HomothetyFit,
    /// Residual threshold for calling the pair homothetic here; looser
    /// than the geometric default because hulls carry probe noise.
    pub homothetic: bool,
    /// `(r/s) * rho^(dim-1)`; 1 when the levels obey the radial law.
    pub relation: f64,
    pub relation_dev: f64,
    /// Center implied by the homothety fixed point `xi / (1 - rho)`.
    pub ball_center: [f64; 2],
    pub ball_radius: f64,
    /// Relative deviation of the outer level from a ball at that center.
    pub ball_residual: f64,
    pub level_r: ExtractedLevel,
    pub level_s: ExtractedLevel,
}

/// Extract two levels and test whether one is a scaled translate of the
/// other, as radial potentials force.
pub fn homothetic_levels_experiment(
    body: &ConvexBody,
    r: f64,
    s: f64,
    cell_size: f64,
) -> Result<HomotheticLevelsReport, AnalysisError> {
    if !(0.0 < r && r < s && s <= 0.6) {
        return Err(AnalysisError::LevelOrder("0 < r < s <= 0.6"));
    }
    let spec = KernelSpec::half_fractional(body.dim())?;
    let sol = base_solution(body, cell_size, &spec)?;
    let level_r = level_set_extract(&sol, r, PROBE_N, body.grid())?;
    let level_s = level_set_extract(&sol, s, PROBE_N, body.grid())?;

    // The lower level is the larger body: level(r) ~ rho * level(s) + xi.
    let fit = detect_homothety(&level_r.body, &level_s.body)?;
    let homothetic = !fit.constrained && fit.residual_rel < 1e-2;
    let relation = (r / s) * fit.rho.powi(body.dim() as i32 - 1);

    let denom = 1.0 - fit.rho;
    let ball_center = if denom.abs() > 1e-12 {
        [fit.xi[0] / denom, fit.xi[1] / denom]
    } else {
        [f64::NAN, f64::NAN]
    };
    let dirs = body.grid().dirs();
    let hs = level_s.body.support_values();
    let mut mean = 0.0;
    for (d, h) in dirs.iter().zip(hs) {
        mean += h - (ball_center[0] * d[0] + ball_center[1] * d[1]);
    }
    mean /= hs.len() as f64;
    let mut worst = 0.0_f64;
    for (d, h) in dirs.iter().zip(hs) {
        let dev = h - (ball_center[0] * d[0] + ball_center[1] * d[1]) - mean;
        worst = worst.max(dev.abs());
    }

    Ok(HomotheticLevelsReport {
        r,
        s,
        fit,
        homothetic,
        relation,
        relation_dev: relation - 1.0,
        ball_center,
        ball_radius: mean,
        ball_residual: worst / mean.abs().max(1e-300),
        level_r,
        level_s,
    })
}

/// Intermediate level defined by the affine relation on `t^(1/(1-n))`.
/// Degenerates to `t = r` when `r = s`, for any lambda.
pub fn blend_level(r: f64, s: f64, lambda: f64, dim: usize) -> f64 {
    let e = 1.0 / (1.0 - dim as f64);
    ((1.0 - lambda) * r.powf(e) + lambda * s.powf(e)).powf(1.0 / e)
}

#[derive(Debug, Clone, Serialize)]
pub struct ThreeLevelsReport {
    pub r: f64,
    pub s: f64,
    pub lambda: f64,
    pub t: f64,
    /// Worst support gap `h_{level(t)} - h_{combination}` over directions;
    /// nonnegative means the combination is included in level(t).
    pub margin: f64,
    pub margin_rel: f64,
    pub included: bool,
    pub level_r: ExtractedLevel,
    pub level_s: ExtractedLevel,
    pub level_t: ExtractedLevel,
}

/// Inclusion test `(1-lambda) level(r) + lambda level(s) inside level(t)`
/// with `t` from `blend_level`.
pub fn three_levels_experiment(
    body: &ConvexBody,
    r: f64,
    s: f64,
    lambda: f64,
    cell_size: f64,
) -> Result<ThreeLevelsReport, AnalysisError> {
    if !(0.0 < s && s < r && r <= 0.6) {
        return Err(AnalysisError::LevelOrder("0 < s < r <= 0.6"));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(AnalysisError::BadLambda(lambda));
    }
    let t = blend_level(r, s, lambda, body.dim());

    let spec = KernelSpec::half_fractional(body.dim())?;
    let sol = base_solution(body, cell_size, &spec)?;
    let level_r = level_set_extract(&sol, r, PROBE_N, body.grid())?;
    let level_s = level_set_extract(&sol, s, PROBE_N, body.grid())?;
    let level_t = level_set_extract(&sol, t, PROBE_N, body.grid())?;

    let combination = minkowski_combine(1.0 - lambda, &level_r.body, &level_s.body)?;
    let mut margin = f64::INFINITY;
    for (ht, hc) in level_t
        .body
        .support_values()
        .iter()
        .zip(combination.support_values())
    {
        margin = margin.min(ht - hc);
    }
    let scale = level_t
        .body
        .support_values()
        .iter()
        .fold(0.0_f64, |m, h| m.max(h.abs()));

    Ok(ThreeLevelsReport {
        r,
        s,
        lambda,
        t,
        margin,
        margin_rel: margin / scale,
        included: margin >= 0.0,
        level_r,
        level_s,
        level_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blend_level_degenerates_when_levels_coincide() {
        for lambda in [0.1, 0.5, 0.9] {
            for r in [0.05, 0.3, 0.6] {
                let t = blend_level(r, r, lambda, 2);
                assert!((t - r).abs() < 1e-15, "t = {t} for r = s = {r}");
            }
        }
    }

    #[test]
    fn blend_level_matches_harmonic_mean_in_the_plane() {
        // 1/t = (1-lambda)/r + lambda/s for n = 2.
        let t = blend_level(0.5, 0.25, 0.5, 2);
        assert!((t - 1.0 / 3.0).abs() < 1e-15, "t = {t}");
    }
}
