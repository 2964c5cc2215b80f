use crate::geometry::ConvexBody;

use super::grid::{ExtensionGrid, ExtensionParams};
use super::ExtensionError;

const INTERIOR: u8 = 0;
const FIXED: u8 = 1;
const REFLECT: u8 = 2;

/// Far-field fit `U ~ value / |X|` over grid-point shells.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ShellFit {
    /// Intercept of `U |X|` against `1/|X|`: the capacity estimate.
    pub value: f64,
    pub slope: f64,
    pub points: usize,
    pub r_min: f64,
    pub r_max: f64,
}

/// Converged finite-difference extension of the body's potential.
#[derive(Debug, Clone)]
pub struct ExtensionSolution {
    grid: ExtensionGrid,
    u: Vec<f64>,
    sweeps: usize,
    residual: f64,
    capacity_estimate: f64,
    /// Total plate charge of the converged field, the monopole coefficient
    /// of its far field.  Independent capacity reading next to `fit.value`.
    boundary_coefficient: f64,
    fit: ShellFit,
}

impl ExtensionSolution {
    pub fn grid(&self) -> &ExtensionGrid {
        &self.grid
    }

    pub fn field(&self) -> &[f64] {
        &self.u
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn capacity_estimate(&self) -> f64 {
        self.capacity_estimate
    }

    pub fn boundary_coefficient(&self) -> f64 {
        self.boundary_coefficient
    }

    pub fn fit(&self) -> &ShellFit {
        &self.fit
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.u[self.grid.index(i, j, k)]
    }
}

/// Capacity of the converged solution (far-field normalization).
pub fn extension_capacity(sol: &ExtensionSolution) -> f64 {
    sol.capacity_estimate
}

/// Relative change in total plate charge below which the outer boundary
/// is considered matched to the field it encloses.
const MATCH_TOL: f64 = 5e-4;
const MAX_PASSES: usize = 6;

/// Solve the half-space extension problem for a planar body.
///
/// The outer boundary carries the potential of the plate's own discrete
/// charges, `U(X) = sum_i q_i / |X - x_i|`, where `q_i` is the stencil
/// residual at Dirichlet node `i` of the previous pass.  The first pass
/// starts grounded (all charges zero); subsequent passes re-extract the
/// charges and repeat until the total charge moves by less than
/// `MATCH_TOL`.  Matching the full charge layer rather than a fitted
/// `c/|X|` keeps every multipole of the far field, so the box can stay
/// at a few circumradii without truncation bias.  The reflection
/// condition on the floor (off the body) encodes the `z -> -z` symmetry
/// of the full-space problem.
pub fn solve_extension(
    body: &ConvexBody,
    params: &ExtensionParams,
) -> Result<ExtensionSolution, ExtensionError> {
    let grid = ExtensionGrid::build(body, params)?;
    let nx = grid.nx();
    let nz = grid.nz();
    let n = grid.len();

    let mut types = vec![INTERIOR; n];
    for k in 0..nz {
        for j in 0..nx {
            for i in 0..nx {
                let outer =
                    i == 0 || j == 0 || i == nx - 1 || j == nx - 1 || k == nz - 1;
                let t = if outer {
                    FIXED
                } else if k == 0 {
                    if grid.mask()[j * nx + i] {
                        FIXED
                    } else {
                        REFLECT
                    }
                } else {
                    INTERIOR
                };
                types[grid.index(i, j, k)] = t;
            }
        }
    }

    let mut u = vec![0.0_f64; n];
    let mut total_sweeps = 0usize;
    let mut final_residual = f64::INFINITY;
    let mut total_charge = 0.0_f64;

    let mut positions: Vec<[f64; 2]> = Vec::new();
    let mut charges: Vec<f64> = Vec::new();
    for pass in 0..MAX_PASSES {
        set_fixed(&grid, &types, &mut u, &positions, &charges);
        let (sweeps, residual) = relax(&grid, &types, &mut u, params)?;
        total_sweeps += sweeps;
        final_residual = residual;

        let (pos, q) = mask_charges(&grid, &u);
        let previous = total_charge;
        total_charge = q.iter().sum();
        positions = pos;
        charges = q;
        if pass > 0 && (total_charge - previous).abs() <= MATCH_TOL * total_charge.abs() {
            break;
        }
    }
    let fit = default_shell_fit(&grid, &u)?;

    if cfg!(debug_assertions) {
        let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        debug_assert!(
            lo >= -1e-9 && hi <= 1.0 + 1e-9,
            "field escapes [0, 1]: min {lo:.3e}, max {hi:.3e}"
        );
    }
    Ok(ExtensionSolution {
        grid,
        u,
        sweeps: total_sweeps,
        residual: final_residual,
        capacity_estimate: fit.value,
        boundary_coefficient: total_charge,
        fit,
    })
}

/// Discrete point charges carried by the plate: the stencil residual of
/// the mirrored full-space Laplacian at each Dirichlet floor node, scaled
/// so the charges sum to total flux over `4 pi`.  By the discrete form of
/// the divergence theorem that sum equals the flux through any enclosing
/// lattice surface, so it reads the far-field coefficient exactly.
fn mask_charges(grid: &ExtensionGrid, u: &[f64]) -> (Vec<[f64; 2]>, Vec<f64>) {
    let nx = grid.nx();
    let plane = nx * nx;
    let scale = grid.h() / (4.0 * std::f64::consts::PI);
    let mut positions = Vec::new();
    let mut charges = Vec::new();
    for j in 0..nx {
        for i in 0..nx {
            let idx = j * nx + i;
            if !grid.mask()[idx] {
                continue;
            }
            let nb = u[idx - 1]
                + u[idx + 1]
                + u[idx - nx]
                + u[idx + nx]
                + 2.0 * u[idx + plane];
            let p = grid.position(i, j, 0);
            positions.push([p[0], p[1]]);
            charges.push(scale * (6.0 * u[idx] - nb));
        }
    }
    (positions, charges)
}

fn set_fixed(
    grid: &ExtensionGrid,
    types: &[u8],
    u: &mut [f64],
    positions: &[[f64; 2]],
    charges: &[f64],
) {
    let nx = grid.nx();
    let nz = grid.nz();
    for k in 0..nz {
        for j in 0..nx {
            for i in 0..nx {
                let idx = grid.index(i, j, k);
                if types[idx] != FIXED {
                    continue;
                }
                u[idx] = if k == 0 && grid.mask()[j * nx + i] {
                    1.0
                } else {
                    let p = grid.position(i, j, k);
                    let mut sum = 0.0;
                    for (xy, q) in positions.iter().zip(charges) {
                        let dx = p[0] - xy[0];
                        let dy = p[1] - xy[1];
                        let dz = p[2];
                        sum += q / (dx * dx + dy * dy + dz * dz).sqrt();
                    }
                    sum
                };
            }
        }
    }
}

/// Natural-order SOR sweeps until the maximal stencil residual meets the
/// target.  Single-threaded by design: the sequential Gauss-Seidel order
/// is deterministic and the dominant cost lives in the dense solver anyway.
fn relax(
    grid: &ExtensionGrid,
    types: &[u8],
    u: &mut [f64],
    params: &ExtensionParams,
) -> Result<(usize, f64), ExtensionError> {
    let nx = grid.nx();
    let nz = grid.nz();
    let plane = nx * nx;
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / (nx as f64 - 1.0)).sin());

    let mut sweeps = 0usize;
    loop {
        let mut max_r = 0.0_f64;
        for k in 0..nz {
            for j in 0..nx {
                let row = (k * nx + j) * nx;
                for i in 0..nx {
                    let idx = row + i;
                    match types[idx] {
                        INTERIOR => {
                            let nb = u[idx - 1]
                                + u[idx + 1]
                                + u[idx - nx]
                                + u[idx + nx]
                                + u[idx - plane]
                                + u[idx + plane];
                            let r = nb / 6.0 - u[idx];
                            max_r = max_r.max(r.abs());
                            u[idx] += omega * r;
                        }
                        REFLECT => {
                            let nb = u[idx - 1]
                                + u[idx + 1]
                                + u[idx - nx]
                                + u[idx + nx]
                                + 2.0 * u[idx + plane];
                            let r = nb / 6.0 - u[idx];
                            max_r = max_r.max(r.abs());
                            u[idx] += omega * r;
                        }
                        _ => {}
                    }
                }
            }
        }
        sweeps += 1;
        if max_r <= params.residual_target {
            // The sweep residual is measured pre-update; confirm on the
            // settled field.
            let settled = residual_pass(grid, types, u);
            if settled <= params.residual_target {
                return Ok((sweeps, settled));
            }
        }
        if sweeps >= params.max_sweeps {
            return Err(ExtensionError::NoConvergence {
                sweeps,
                residual: residual_pass(grid, types, u),
                target: params.residual_target,
            });
        }
    }
}

fn residual_pass(grid: &ExtensionGrid, types: &[u8], u: &[f64]) -> f64 {
    let nx = grid.nx();
    let nz = grid.nz();
    let plane = nx * nx;
    let mut max_r = 0.0_f64;
    for k in 0..nz {
        for j in 0..nx {
            let row = (k * nx + j) * nx;
            for i in 0..nx {
                let idx = row + i;
                let nb = match types[idx] {
                    INTERIOR => {
                        u[idx - 1]
                            + u[idx + 1]
                            + u[idx - nx]
                            + u[idx + nx]
                            + u[idx - plane]
                            + u[idx + plane]
                    }
                    REFLECT => {
                        u[idx - 1]
                            + u[idx + 1]
                            + u[idx - nx]
                            + u[idx + nx]
                            + 2.0 * u[idx + plane]
                    }
                    _ => continue,
                };
                max_r = max_r.max((nb / 6.0 - u[idx]).abs());
            }
        }
    }
    max_r
}

fn default_shell_fit(grid: &ExtensionGrid, u: &[f64]) -> Result<ShellFit, ExtensionError> {
    let r_min = (1.5 * grid.circumradius()).max(3.0 * grid.h());
    let r_max = 0.9 * grid.half_width();
    shell_fit(grid, u, r_min, r_max)
}

/// Least-squares fit of `U |X|` against `1/|X|` over every grid point in
/// the radial window, points above the floor weighted twice for their
/// mirror images.  Returns the intercept (the capacity) and slope.
pub fn shell_fit(
    grid: &ExtensionGrid,
    field: &[f64],
    r_min: f64,
    r_max: f64,
) -> Result<ShellFit, ExtensionError> {
    if !(r_max > r_min + 5.0 * grid.h()) {
        return Err(ExtensionError::ShellRange(format!(
            "window [{r_min:.4}, {r_max:.4}] is thinner than five cells"
        )));
    }
    let nx = grid.nx();
    let nz = grid.nz();
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0_f64, 0.0, 0.0, 0.0, 0.0);
    let mut points = 0usize;
    for k in 0..nz {
        let w = if k == 0 { 1.0 } else { 2.0 };
        for j in 0..nx {
            for i in 0..nx {
                let rho = grid.radius(i, j, k);
                if rho < r_min || rho > r_max {
                    continue;
                }
                let x = 1.0 / rho;
                let y = field[grid.index(i, j, k)] * rho;
                sw += w;
                sx += w * x;
                sy += w * y;
                sxx += w * x * x;
                sxy += w * x * y;
                points += 1;
            }
        }
    }
    if points < 100 {
        return Err(ExtensionError::ShellRange(format!(
            "only {points} grid points in the radial window"
        )));
    }
    let det = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / det;
    let value = (sy - slope * sx) / sw;
    Ok(ShellFit {
        value,
        slope,
        points,
        r_min,
        r_max,
    })
}
