//! Numerical laboratory for Riesz capacities of convex bodies.
//!
//! The crate measures the 1-Riesz capacity of convex bodies in the plane
//! (kernel `|x - y|^{-1}`, the electrostatics of a charged conducting
//! plate) and, parametrically, other Riesz kernels `|x - y|^{-s}` with
//! `0 < s < m`.  Capacity is normalized as the far-field coefficient
//! `lim u(x) |x|^s` of the equilibrium potential `u`, which for the
//! equilibrium-measure formulation equals the total mass of the measure.
//!
//! Module map:
//! * [`geometry`] — support-function representation of convex bodies,
//!   Minkowski combinations, homothety detection, rasterization.
//! * [`solver`] — dense-kernel equilibrium solver and capacity estimates.
//! * [`extension`] — independent finite-difference harmonic-extension
//!   solver used as a cross-check oracle for the planar kernel solver.
//! * [`analysis`] — Brunn-Minkowski deficit sweeps, concavity-index
//!   estimation, and level-set experiments built on the solvers.

pub mod analysis;
pub mod extension;
pub mod geometry;
pub mod solver;

pub use geometry::{
    detect_homothety, minkowski_combine, ConvexBody, DirectionGrid, GeometryError, HomothetyFit,
    Point, Quadrature,
};
pub use solver::{
    capacity, solve_equilibrium, CapacityEstimate, EquilibriumSolution, KernelSpec, SolverError,
};

/// Crate version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
