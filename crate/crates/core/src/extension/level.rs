use crate::geometry::{Point, Quadrature};

use super::solve::ExtensionSolution;
use super::ExtensionError;

/// Soft ceiling on emitted nodes; the kernel solver's dense matrix budget
/// (a 16k-node kernel matrix is about 2 GB).
const DEFAULT_MAX_NODES: usize = 16_000;

/// Super-level body `{U >= level}` as a volume quadrature for the
/// three-dimensional kernel solver, mirrored through the floor.
///
/// Cells come from a `factor`-coarsened sublattice of the solve grid; a
/// coarse cell is kept when the field at its center point reaches the
/// level, with no isosurface interpolation (the downstream solver's own
/// discretization error dominates anything interpolation would buy).
pub fn extension_level_body(
    sol: &ExtensionSolution,
    level: f64,
) -> Result<Quadrature, ExtensionError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(ExtensionError::BadLevel(level));
    }
    // Count fine points in the half-space to size the coarsening.
    let grid = sol.grid();
    let nx = grid.nx();
    let nz = grid.nz();
    let mut fine = 0usize;
    for k in 0..nz {
        let w = if k == 0 { 1 } else { 2 };
        for j in 0..nx {
            for i in 0..nx {
                if sol.value(i, j, k) >= level {
                    fine += w;
                }
            }
        }
    }
    let mut factor = 1usize;
    while fine / (factor * factor * factor) > DEFAULT_MAX_NODES {
        factor += 1;
    }
    extension_level_body_with(sol, level, factor)
}

/// Same extraction with the coarsening factor pinned by the caller, which
/// keeps the sublattice identical across levels so that cell-wise nesting
/// of super-level bodies is exact.
pub fn extension_level_body_with(
    sol: &ExtensionSolution,
    level: f64,
    factor: usize,
) -> Result<Quadrature, ExtensionError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(ExtensionError::BadLevel(level));
    }
    assert!(factor >= 1);
    let grid = sol.grid();
    let nx = grid.nx();
    let nz = grid.nz();
    let h = grid.h();
    let cell = factor as f64 * h;
    let volume = cell * cell * cell;

    let mut nodes: Vec<Point> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let max_i = nx - 1;
    let max_k = nz - 1;
    for k in (0..nz).step_by(factor) {
        for j in (0..nx).step_by(factor) {
            for i in (0..nx).step_by(factor) {
                if sol.value(i, j, k) < level {
                    continue;
                }
                // A populated cell flush against the box means the level
                // set is clipped, not resolved.
                if i < factor
                    || j < factor
                    || i + factor > max_i
                    || j + factor > max_i
                    || k + factor > max_k
                {
                    return Err(ExtensionError::LevelTouchesBoundary { level });
                }
                let p = grid.position(i, j, k);
                if k == 0 {
                    // Floor cell straddles the symmetry plane: counted once.
                    nodes.push(p);
                    weights.push(volume);
                } else {
                    nodes.push(p);
                    weights.push(volume);
                    nodes.push([p[0], p[1], -p[2]]);
                    weights.push(volume);
                }
            }
        }
    }
    Ok(Quadrature::from_nodes(3, nodes, weights, cell)?)
}
