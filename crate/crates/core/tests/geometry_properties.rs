//! Randomized invariants of the support-function representation.
//!
//! These hold exactly (up to floating-point roundoff) for every convex
//! body, so random geometry is the right way to test them: scaling and
//! translation must round-trip through the homothety detector, Minkowski
//! combination must act linearly on support values, and the subset test
//! must agree with radius order on concentric balls.

use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;

use rieszcap::geometry::{minkowski_combine, pt2, CellWeighting, Quadrature};
use rieszcap::{detect_homothety, ConvexBody, DirectionGrid};

fn grid() -> Arc<DirectionGrid> {
    Arc::new(DirectionGrid::uniform(2, 128).expect("valid grid"))
}

fn ball(cx: f64, cy: f64, r: f64) -> ConvexBody {
    ConvexBody::ball(pt2(cx, cy), r, &grid()).expect("valid ball")
}

/// Triangle with a guaranteed minimum height so the vertices never become
/// affinely dependent under shrinking.
fn triangle(cx: f64, cy: f64, spread: f64) -> ConvexBody {
    let pts = [
        pt2(cx - spread, cy - 0.4 * spread),
        pt2(cx + spread, cy - 0.3 * spread),
        pt2(cx, cy + spread),
    ];
    ConvexBody::polytope(&pts, &grid()).expect("valid triangle")
}

proptest! {
    #[test]
    fn homothety_round_trips_through_scale_translate(
        cx in -2.0..2.0f64,
        cy in -2.0..2.0f64,
        spread in 0.3..3.0f64,
        rho in 0.1..10.0f64,
        tx in -5.0..5.0f64,
        ty in -5.0..5.0f64,
    ) {
        let body = triangle(cx, cy, spread);
        let moved = body.scale_translate(rho, pt2(tx, ty)).unwrap();
        let fit = detect_homothety(&moved, &body).unwrap();
        prop_assert!(fit.is_homothety());
        prop_assert!(fit.residual_rel < 1e-10);
        assert_relative_eq!(fit.rho, rho, max_relative = 1e-9);
        assert_relative_eq!(fit.xi[0], tx, epsilon = 1e-8 * (1.0 + tx.abs()));
        assert_relative_eq!(fit.xi[1], ty, epsilon = 1e-8 * (1.0 + ty.abs()));
    }

    #[test]
    fn combination_is_linear_on_support_values(
        lambda in 0.0..=1.0f64,
        r1 in 0.2..3.0f64,
        spread in 0.3..2.0f64,
    ) {
        let a = ball(-0.5, 0.3, r1);
        let b = triangle(0.4, -0.2, spread);
        let c = minkowski_combine(lambda, &a, &b).unwrap();
        for ((hc, ha), hb) in c
            .support_values()
            .iter()
            .zip(a.support_values())
            .zip(b.support_values())
        {
            assert_relative_eq!(
                *hc,
                lambda * ha + (1.0 - lambda) * hb,
                epsilon = 1e-12 * (1.0 + ha.abs() + hb.abs())
            );
        }
    }

    #[test]
    fn subset_matches_radius_order_on_concentric_balls(
        cx in -2.0..2.0f64,
        cy in -2.0..2.0f64,
        r1 in 0.2..3.0f64,
        r2 in 0.2..3.0f64,
    ) {
        let a = ball(cx, cy, r1);
        let b = ball(cx, cy, r2);
        prop_assert_eq!(a.is_subset(&b).unwrap(), r1 <= r2);
        prop_assert_eq!(b.is_subset(&a).unwrap(), r2 <= r1);
    }

    #[test]
    fn bodies_fit_inside_their_outer_ball(
        cx in -2.0..2.0f64,
        cy in -2.0..2.0f64,
        spread in 0.3..3.0f64,
    ) {
        let body = triangle(cx, cy, spread);
        let radius = body.outer_radius_about(pt2(cx, cy));
        let hull = ball(cx, cy, radius + 1e-12 * (1.0 + radius));
        prop_assert!(body.is_subset(&hull).unwrap());
    }

    #[test]
    fn rasterized_mass_matches_area(
        r in 0.5..2.0f64,
    ) {
        // Occupancy weighting integrates the indicator, so total weight
        // approximates the area with an O(h) boundary error.
        let body = ball(0.0, 0.0, r);
        let h = 0.05 * r;
        let q = Quadrature::rasterize(&body, h, CellWeighting::Occupancy).unwrap();
        let total: f64 = q.weights().iter().sum();
        let area = std::f64::consts::PI * r * r;
        prop_assert!((total - area).abs() / area < 0.02);
    }
}
