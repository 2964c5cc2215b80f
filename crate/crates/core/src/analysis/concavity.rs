//! Concavity index of a positive scalar field.
//!
//! A positive function is beta-concave when its beta-th power is concave
//! (beta > 0), its logarithm is concave (beta = 0), or its beta-th power
//! is convex (beta < 0).  All three cases collapse into one predicate in
//! terms of the power mean: the field at a segment midpoint must dominate
//! the beta-power-mean of the endpoint values.  The index is the largest
//! beta for which no sampled segment violates that predicate, located by
//! bisection; smaller beta makes the power mean smaller, so acceptance is
//! monotone and bisection is sound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::ConvexBody;
use crate::solver::{
    capacity_with, eval_potential_at, solve_equilibrium_with, CapacityEstimate, CapacityParams,
    EquilibriumSolution, KernelSpec,
};
use crate::Quadrature;

use super::AnalysisError;

/// Positive scalar field on the plane.  Implemented by closures and by
/// solver potentials.
pub trait ScalarField2 {
    fn value(&self, p: [f64; 2]) -> f64;
}

impl<F: Fn([f64; 2]) -> f64> ScalarField2 for F {
    fn value(&self, p: [f64; 2]) -> f64 {
        self(p)
    }
}

/// Planar equilibrium potential as a sampling field.
pub struct PotentialField<'a> {
    sol: &'a EquilibriumSolution,
}

impl<'a> PotentialField<'a> {
    pub fn new(sol: &'a EquilibriumSolution) -> Self {
        Self { sol }
    }
}

impl ScalarField2 for PotentialField<'_> {
    fn value(&self, p: [f64; 2]) -> f64 {
        eval_potential_at(self.sol, [p[0], p[1], 0.0])
    }
}

/// Annular sampling region centered away from the field's singular set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Annulus {
    pub center: [f64; 2],
    pub r_lo: f64,
    pub r_hi: f64,
}

impl Annulus {
    pub fn new(center: [f64; 2], r_lo: f64, r_hi: f64) -> Result<Self, AnalysisError> {
        if !(r_lo.is_finite() && r_hi.is_finite() && 0.0 < r_lo && r_lo < r_hi) {
            return Err(AnalysisError::EmptyRegion(format!(
                "annulus radii [{r_lo}, {r_hi}]"
            )));
        }
        Ok(Self { center, r_lo, r_hi })
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let r = (dx * dx + dy * dy).sqrt();
        self.r_lo <= r && r <= self.r_hi
    }

    /// Area-uniform sample.
    fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        let u: f64 = rng.gen();
        let r = (self.r_lo * self.r_lo + u * (self.r_hi * self.r_hi - self.r_lo * self.r_lo))
            .sqrt();
        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
        [
            self.center[0] + r * theta.cos(),
            self.center[1] + r * theta.sin(),
        ]
    }
}

pub struct ConcavityParams {
    /// Bisection bracket for beta; the lower end must be accepted.
    pub bracket: (f64, f64),
    pub segments: usize,
    pub seed: u64,
    /// Final bracket width.
    pub bracket_tol: f64,
    /// Slack of the midpoint predicate in log space; absorbs rounding,
    /// not discretization error (bars handle that upstream).
    pub violation_tol: f64,
}

impl Default for ConcavityParams {
    fn default() -> Self {
        Self {
            bracket: (-8.0, 1.0),
            segments: 2000,
            seed: 0,
            bracket_tol: 0.02,
            violation_tol: 1e-4,
        }
    }
}

/// One accept/reject decision of the bisection.
#[derive(Debug, Clone, Serialize)]
pub struct BetaProbe {
    pub beta: f64,
    pub accepted: bool,
    /// Worst violation of the midpoint predicate in log space.
    pub worst_violation: f64,
    /// Midpoint of the worst segment.
    pub worst_at: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityReport {
    /// Largest accepted beta.
    pub alpha: f64,
    /// Bracket `[accepted, rejected]` at termination; width at most the
    /// configured tolerance unless the upper end itself was accepted.
    pub bracket: (f64, f64),
    pub probes: Vec<BetaProbe>,
    pub segments: usize,
    pub seed: u64,
    pub region: Annulus,
    /// Acceptance re-checked on a few beta below alpha.
    pub monotone_consistent: bool,
    /// Theoretical ceiling `1/(1-n)` when the field is a body potential.
    pub ceiling: Option<f64>,
    /// `alpha - ceiling` when the ceiling applies.
    pub gap: Option<f64>,
}

struct Segment {
    log_a: f64,
    log_b: f64,
    log_mid: f64,
    mid: [f64; 2],
}

/// Log of the beta-power-mean of two values given by their logs; the
/// geometric-mean limit is handled by a series in beta.
fn log_power_mean(beta: f64, la: f64, lb: f64) -> f64 {
    let d = la - lb;
    if beta.abs() * d * d < 1e-6 {
        0.5 * (la + lb) + 0.125 * beta * d * d
    } else {
        let sa = beta * la;
        let sb = beta * lb;
        let m = sa.max(sb);
        (m + (0.5 * ((sa - m).exp() + (sb - m).exp())).ln()) / beta
    }
}

fn probe(segments: &[Segment], beta: f64, tol: f64) -> BetaProbe {
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = [f64::NAN; 2];
    for s in segments {
        let violation = log_power_mean(beta, s.log_a, s.log_b) - s.log_mid;
        if violation > worst {
            worst = violation;
            worst_at = s.mid;
        }
    }
    BetaProbe {
        beta,
        accepted: worst <= tol,
        worst_violation: worst,
        worst_at,
    }
}

fn positive_log<F: ScalarField2 + ?Sized>(
    field: &F,
    p: [f64; 2],
) -> Result<f64, AnalysisError> {
    let v = field.value(p);
    if !(v > 0.0) || !v.is_finite() {
        return Err(AnalysisError::NonPositiveField {
            value: v,
            x: p[0],
            y: p[1],
        });
    }
    Ok(v.ln())
}

/// Estimate the concavity index of `field` on `region` by seeded random
/// midpoint tests and bisection over beta.
pub fn concavity_index<F: ScalarField2 + ?Sized>(
    field: &F,
    region: &Annulus,
    params: &ConcavityParams,
) -> Result<ConcavityReport, AnalysisError> {
    let (lo0, hi0) = params.bracket;
    if !(lo0 < hi0 && hi0 <= 1.0) {
        return Err(AnalysisError::EmptyRegion(format!(
            "beta bracket [{lo0}, {hi0}]"
        )));
    }
    if params.segments == 0 {
        return Err(AnalysisError::EmptyRegion("zero segments".into()));
    }

    // Draw the segment sample once; every beta is judged on the same set,
    // which is what makes acceptance monotone in beta by construction.
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut segments = Vec::with_capacity(params.segments);
    let mut attempts = 0usize;
    while segments.len() < params.segments {
        attempts += 1;
        if attempts > 1000 * params.segments {
            return Err(AnalysisError::EmptyRegion(
                "midpoints keep leaving the region".into(),
            ));
        }
        let a = region.sample(&mut rng);
        let b = region.sample(&mut rng);
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        if !region.contains(mid) {
            continue;
        }
        segments.push(Segment {
            log_a: positive_log(field, a)?,
            log_b: positive_log(field, b)?,
            log_mid: positive_log(field, mid)?,
            mid,
        });
    }

    let mut probes = Vec::new();
    let top = probe(&segments, hi0, params.violation_tol);
    let top_accepted = top.accepted;
    probes.push(top);
    let (alpha, bracket) = if top_accepted {
        (hi0, (hi0, hi0))
    } else {
        let bottom = probe(&segments, lo0, params.violation_tol);
        if !bottom.accepted {
            let violation = bottom.worst_violation;
            probes.push(bottom);
            return Err(AnalysisError::BracketRejected {
                beta: lo0,
                violation,
            });
        }
        probes.push(bottom);
        let (mut lo, mut hi) = (lo0, hi0);
        while hi - lo > params.bracket_tol {
            let mid = 0.5 * (lo + hi);
            let p = probe(&segments, mid, params.violation_tol);
            let accepted = p.accepted;
            probes.push(p);
            if accepted {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, (lo, hi))
    };

    // Spot-check monotonicity: everything below alpha stays accepted.
    let mut monotone_consistent = true;
    for k in 1..=3 {
        let beta = alpha - k as f64 * 0.125 * (hi0 - lo0);
        if beta < lo0 {
            break;
        }
        let p = probe(&segments, beta, params.violation_tol);
        monotone_consistent &= p.accepted;
        probes.push(p);
    }

    Ok(ConcavityReport {
        alpha,
        bracket,
        probes,
        segments: params.segments,
        seed: params.seed,
        region: *region,
        monotone_consistent,
        ceiling: None,
        gap: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BodyConcavityReport {
    pub concavity: ConcavityReport,
    pub capacity: CapacityEstimate,
    /// Sampling shell in absolute radii about the charge centroid.
    pub shell: (f64, f64),
}

/// Solve for the body's potential and estimate its concavity index on a
/// shell of `shell_factors` times the circumradius about the centroid.
/// The report carries the dimensional ceiling `1/(1-n)` and the gap to it.
pub fn body_concavity_experiment(
    body: &ConvexBody,
    cell_size: f64,
    shell_factors: (f64, f64),
    params: &ConcavityParams,
) -> Result<BodyConcavityReport, AnalysisError> {
    let spec = KernelSpec::half_fractional(body.dim())?;
    let cap_params = CapacityParams::default();
    let capacity = capacity_with(body, cell_size, &spec, &cap_params)?;

    let q = Quadrature::rasterize(body, cell_size, cap_params.weighting)?;
    let sol = solve_equilibrium_with(&q, &spec, &cap_params.solve)?;
    let center = sol.charge_centroid();
    let extent = q
        .nodes()
        .iter()
        .map(|n| {
            let dx = n[0] - center[0];
            let dy = n[1] - center[1];
            (dx * dx + dy * dy).sqrt()
        })
        .fold(0.0_f64, f64::max)
        + 0.5 * cell_size;

    let r_lo = shell_factors.0 * extent;
    let r_hi = shell_factors.1 * extent;
    if r_lo < extent + 2.0 * cell_size {
        return Err(AnalysisError::ShellTooClose {
            lo: r_lo,
            hi: r_hi,
            body: extent,
        });
    }
    let region = Annulus::new([center[0], center[1]], r_lo, r_hi)?;
    let field = PotentialField::new(&sol);
    let mut concavity = concavity_index(&field, &region, params)?;
    let ceiling = 1.0 / (1.0 - body.dim() as f64);
    concavity.ceiling = Some(ceiling);
    concavity.gap = Some(concavity.alpha - ceiling);

    Ok(BodyConcavityReport {
        concavity,
        capacity,
        shell: (r_lo, r_hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus() -> Annulus {
        Annulus::new([0.0, 0.0], 1.2, 6.0).unwrap()
    }

    fn params() -> ConcavityParams {
        ConcavityParams {
            segments: 1500,
            ..Default::default()
        }
    }

    #[test]
    fn log_power_mean_matches_direct_evaluation() {
        let (la, lb) = (0.3_f64, -0.9_f64);
        for beta in [-3.0, -1.0, -0.2, 0.4, 1.0] {
            let direct =
                (0.5 * ((beta * la).exp() + (beta * lb).exp())).powf(1.0 / beta).ln();
            let got = log_power_mean(beta, la, lb);
            assert!((got - direct).abs() < 1e-12, "beta {beta}: {got} vs {direct}");
        }
        // Geometric-mean limit.
        assert!((log_power_mean(0.0, la, lb) - 0.5 * (la + lb)).abs() < 1e-12);
        assert!((log_power_mean(1e-9, la, lb) - 0.5 * (la + lb)).abs() < 1e-9);
    }

    #[test]
    fn reciprocal_norm_field_has_index_minus_one() {
        let field = |p: [f64; 2]| 1.0 / (p[0] * p[0] + p[1] * p[1]).sqrt();
        let report = concavity_index(&field, &annulus(), &params()).unwrap();
        assert!(
            (report.alpha + 1.0).abs() < 0.05,
            "alpha = {}",
            report.alpha
        );
        assert!(report.monotone_consistent);
    }

    #[test]
    fn gaussian_field_is_log_concave_exactly() {
        let field = |p: [f64; 2]| (-(p[0] * p[0] + p[1] * p[1])).exp();
        let report = concavity_index(&field, &annulus(), &params()).unwrap();
        assert!(report.alpha.abs() < 0.05, "alpha = {}", report.alpha);
    }

    #[test]
    fn constant_field_is_concave_up_to_one() {
        let field = |_: [f64; 2]| 1.0;
        let report = concavity_index(&field, &annulus(), &params()).unwrap();
        assert_eq!(report.alpha, 1.0);
        assert_eq!(report.bracket, (1.0, 1.0));
    }

    #[test]
    fn determinism_for_fixed_seed() {
        let field = |p: [f64; 2]| 1.0 / (p[0] * p[0] + p[1] * p[1]).sqrt();
        let a = concavity_index(&field, &annulus(), &params()).unwrap();
        let b = concavity_index(&field, &annulus(), &params()).unwrap();
        assert_eq!(a.alpha, b.alpha);
        assert_eq!(a.probes.len(), b.probes.len());
        assert_eq!(a.probes[0].worst_violation, b.probes[0].worst_violation);
    }

    #[test]
    fn rejects_non_positive_fields_and_bad_brackets() {
        let field = |p: [f64; 2]| p[0];
        let got = concavity_index(&field, &annulus(), &params());
        assert!(matches!(got, Err(AnalysisError::NonPositiveField { .. })));

        let field = |_: [f64; 2]| 1.0;
        let bad = ConcavityParams {
            bracket: (2.0, 1.0),
            ..Default::default()
        };
        assert!(concavity_index(&field, &annulus(), &bad).is_err());
    }

    #[test]
    fn strongly_oscillating_field_rejects_the_whole_bracket() {
        let field = |p: [f64; 2]| 1.0 + 0.9 * (40.0 * p[0]).sin();
        let got = concavity_index(&field, &annulus(), &params());
        assert!(matches!(got, Err(AnalysisError::BracketRejected { .. })));
    }
}
