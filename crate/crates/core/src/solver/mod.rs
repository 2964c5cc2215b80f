//! Equilibrium-measure capacity solver.
//!
//! Discretizes a body into cells, solves `G (w mu) = 1` for the
//! equilibrium charges with a dense symmetric kernel matrix `G`, and reads
//! capacity off in two independent normalizations: total charge and the
//! far-field coefficient of the potential.  Their discrepancy is the
//! built-in quadrature error indicator.

mod asymptotic;
mod capacity;
mod cg;
mod equilibrium;
mod kernel;
mod potential;
mod refine;

pub use asymptotic::{capacity_asymptotic, AsymptoticFit};
pub use capacity::{capacity, capacity_with, CapacityEstimate, CapacityParams};
pub use cg::{solve_pcg, CgOutcome};
pub use equilibrium::{
    solve_equilibrium, solve_equilibrium_with, EquilibriumSolution, SolveOptions,
};
pub use kernel::{assemble_kernel, DenseKernel, KernelSpec};
pub use potential::{eval_potential, eval_potential_at};
pub use refine::{
    extrapolate_values, refine_study, refine_study_with, Extrapolation, RefineRow, RefineStudy,
};

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("kernel exponent must satisfy 0 < s < dim with dim 2 or 3, got dim {dim}, s {s}")]
    InvalidKernel { dim: usize, s: f64 },
    #[error("kernel dimension {kernel_dim} does not match quadrature dimension {quadrature_dim}")]
    DimensionMismatch {
        kernel_dim: usize,
        quadrature_dim: usize,
    },
    #[error("{nodes} nodes exceed the dense-matrix cap {cap}")]
    TooLarge { nodes: usize, cap: usize },
    #[error("quadrature nodes {i} and {j} coincide")]
    CoincidentNodes { i: usize, j: usize },
    #[error("kernel matrix has a non-finite entry")]
    NonFiniteEntry,
    #[error(
        "conjugate gradients stalled after {iterations} iterations at relative residual \
         {residual:.3e} (target {tolerance:.3e}); the assembled system is ill-conditioned"
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },
    #[error("matrix is not positive definite (detected at iteration {iteration})")]
    NotPositiveDefinite { iteration: usize },
    #[error("equilibrium mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("invalid far-field radii: {0}")]
    BadRadii(String),
    #[error("invalid refinement ladder: {0}")]
    BadLadder(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
