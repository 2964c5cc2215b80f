//! Harmonic-extension oracle.
//!
//! A planar body's half-fractional equilibrium potential is the boundary
//! trace of a function harmonic in the upper half-space that equals 1 on
//! the body.  This module solves that three-dimensional problem by finite
//! differences, giving a capacity estimate and level-set bodies that are
//! computed by entirely different machinery than the kernel solver, so
//! agreement between the two is a real cross-check.

mod grid;
mod level;
mod solve;

pub use grid::{ExtensionGrid, ExtensionParams};
pub use level::{extension_level_body, extension_level_body_with};
pub use solve::{extension_capacity, shell_fit, solve_extension, ExtensionSolution, ShellFit};

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error)]
pub enum ExtensionError {
    #[error("the extension solver handles planar bodies only, got dim {0}")]
    PlanarOnly(usize),
    #[error("invalid extension parameters: {0}")]
    BadParams(String),
    #[error("no grid point on the floor falls inside the body; refine the grid")]
    EmptyMask,
    #[error(
        "relaxation stalled after {sweeps} sweeps at residual {residual:.3e} \
         (target {target:.3e})"
    )]
    NoConvergence {
        sweeps: usize,
        residual: f64,
        target: f64,
    },
    #[error("far-field shell range is degenerate: {0}")]
    ShellRange(String),
    #[error("level value must lie strictly between 0 and 1, got {0}")]
    BadLevel(f64),
    #[error("level set at {level} reaches the computational box; enlarge the box")]
    LevelTouchesBoundary { level: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
