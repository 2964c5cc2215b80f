//! Experiment layer on top of the solvers: Minkowski-combination capacity
//! sweeps with error bars, concavity-index estimation for potentials,
//! level-set extraction with convexity and homothety diagnostics, and
//! radial-symmetry checks.
//!
//! Every experiment is a pure function of its inputs and an explicit seed,
//! so repeated runs reproduce byte-identical reports.  Inequality-style
//! conclusions always compare against error bars from refinement ladders
//! rather than raw tolerances; the bars separate discretization error from
//! genuine deficits.

mod bm;
mod concavity;
mod levelset;
mod radial;

pub use bm::{
    bm_equality_probe, bm_sweep, bm_sweep_with, equality_probe_from, BmClass, BmParams, BmPoint,
    BmReport, EqualityClass, EqualityProbe,
};
pub use concavity::{
    body_concavity_experiment, concavity_index, Annulus, BetaProbe, BodyConcavityReport,
    ConcavityParams, ConcavityReport, PotentialField, ScalarField2,
};
pub use levelset::{
    blend_level, homothetic_levels_experiment, level_scaling_experiment, level_set_extract,
    three_levels_experiment, ExtractedLevel, HomotheticLevelsReport, LevelScalingReport,
    LevelScalingRow, ThreeLevelsReport,
};
pub use radial::{radiality_test, RadialityReport, RadialityRow};

use crate::geometry::GeometryError;
use crate::solver::SolverError;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error("lambda {0} outside (0, 1)")]
    BadLambda(f64),

    #[error("lambda grid must be strictly increasing and inside (0, 1)")]
    BadLambdaGrid,

    #[error("level {0} outside the valid range {1}")]
    BadLevel(f64, &'static str),

    #[error("levels must satisfy {0}")]
    LevelOrder(&'static str),

    #[error("sampling region is empty or too thin: {0}")]
    EmptyRegion(String),

    #[error("field is not strictly positive: value {value:.3e} at ({x:.4}, {y:.4})")]
    NonPositiveField { value: f64, x: f64, y: f64 },

    #[error("field rejects even the lower bracket beta = {beta}: worst violation {violation:.3e}")]
    BracketRejected { beta: f64, violation: f64 },

    #[error("sampling shell [{lo:.4}, {hi:.4}] must clear the body (radius {body:.4}) by two cells")]
    ShellTooClose { lo: f64, hi: f64, body: f64 },

    #[error("level set reaches the probe lattice boundary: {0}")]
    ProbeBoundary(String),

    #[error("radius {radius:.4} does not clear the charge support (extent {extent:.4})")]
    RadiusInsideBody { radius: f64, extent: f64 },
}
