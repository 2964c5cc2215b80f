use crate::geometry::Quadrature;

use super::cg::solve_pcg;
use super::kernel::{assemble_kernel, DenseKernel, KernelSpec};
use super::SolverError;

/// Knobs for the equilibrium solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Relative residual target for the linear solve.
    pub rel_tol: f64,
    /// Iteration cap as a multiple of sqrt(node count).
    pub max_iter_factor: f64,
    /// Project the density onto the nonnegative cone by an active-set
    /// loop (sensitivity studies only; the default reports negativity
    /// instead of hiding it).
    pub nonneg_projection: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter_factor: 20.0,
            nonneg_projection: false,
        }
    }
}

/// Discrete equilibrium measure of a body: the density solving
/// `sum_j k(x_i, x_j) w_j mu_j = 1` at every node.
///
/// The capacity in the far-field normalization equals the total mass
/// `sum_j w_j mu_j`, because the potential of the equilibrium measure
/// behaves like `mass / |x|^s` at infinity.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    quadrature: Quadrature,
    kernel: KernelSpec,
    density: Vec<f64>,
    charge: Vec<f64>,
    capacity_mass: f64,
    residual_max: f64,
    residual_rms: f64,
    negative_count: usize,
    negative_min: f64,
    negative_mass_fraction: f64,
    cg_iterations: usize,
    projected: bool,
}

impl EquilibriumSolution {
    pub fn quadrature(&self) -> &Quadrature {
        &self.quadrature
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// Density per unit cell measure (`mu_j`); may dip negative near the
    /// boundary, where the continuum density diverges.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Per-node charge `w_j mu_j`.
    pub fn charge(&self) -> &[f64] {
        &self.charge
    }

    /// Total equilibrium mass, the capacity in far-field normalization.
    pub fn capacity_mass(&self) -> f64 {
        self.capacity_mass
    }

    /// Largest deviation of the potential from 1 over the nodes
    /// (linear-solve residual, not discretization error).
    pub fn residual_max(&self) -> f64 {
        self.residual_max
    }

    pub fn residual_rms(&self) -> f64 {
        self.residual_rms
    }

    pub fn negative_count(&self) -> usize {
        self.negative_count
    }

    /// Most negative density value, 0 when none are negative.
    pub fn negative_min(&self) -> f64 {
        self.negative_min
    }

    /// Negative charge magnitude relative to the total mass.
    pub fn negative_mass_fraction(&self) -> f64 {
        self.negative_mass_fraction
    }

    pub fn cg_iterations(&self) -> usize {
        self.cg_iterations
    }

    pub fn projected(&self) -> bool {
        self.projected
    }

    /// Charge-weighted centroid; far-field fits expand about this point,
    /// which cancels the dipole term of the multipole series exactly.
    pub fn charge_centroid(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        for (node, q) in self.quadrature.nodes().iter().zip(&self.charge) {
            for k in 0..3 {
                c[k] += q * node[k];
            }
        }
        for v in &mut c {
            *v /= self.capacity_mass;
        }
        c
    }

    /// Wrap an externally supplied charge vector (synthetic fields in
    /// tests, cross-checks).  Residual statistics are computed against the
    /// all-ones potential and are only meaningful for genuine equilibrium
    /// charges.
    pub fn from_charges(
        quadrature: Quadrature,
        kernel: KernelSpec,
        charge: Vec<f64>,
    ) -> Result<Self, SolverError> {
        if charge.len() != quadrature.len() {
            return Err(SolverError::DimensionMismatch {
                kernel_dim: charge.len(),
                quadrature_dim: quadrature.len(),
            });
        }
        let density: Vec<f64> = charge
            .iter()
            .zip(quadrature.weights())
            .map(|(c, w)| c / w)
            .collect();
        Self::finish(quadrature, kernel, density, charge, f64::NAN, f64::NAN, 0, false)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        quadrature: Quadrature,
        kernel: KernelSpec,
        density: Vec<f64>,
        charge: Vec<f64>,
        residual_max: f64,
        residual_rms: f64,
        cg_iterations: usize,
        projected: bool,
    ) -> Result<Self, SolverError> {
        let capacity_mass: f64 = charge.iter().sum();
        if !(capacity_mass > 0.0) {
            return Err(SolverError::NonPositiveMass(capacity_mass));
        }
        let negative_count = density.iter().filter(|d| **d < 0.0).count();
        let negative_min = density.iter().copied().fold(0.0_f64, f64::min);
        let negative_charge: f64 = charge.iter().filter(|c| **c < 0.0).map(|c| -c).sum();
        Ok(Self {
            quadrature,
            kernel,
            density,
            charge,
            capacity_mass,
            residual_max,
            residual_rms,
            negative_count,
            negative_min,
            negative_mass_fraction: negative_charge / capacity_mass,
            cg_iterations,
            projected,
        })
    }
}

pub fn solve_equilibrium(
    q: &Quadrature,
    spec: &KernelSpec,
) -> Result<EquilibriumSolution, SolverError> {
    solve_equilibrium_with(q, spec, &SolveOptions::default())
}

pub fn solve_equilibrium_with(
    q: &Quadrature,
    spec: &KernelSpec,
    opts: &SolveOptions,
) -> Result<EquilibriumSolution, SolverError> {
    let matrix = assemble_kernel(q, spec)?;
    let n = q.len();
    let max_iter = (opts.max_iter_factor * (n as f64).sqrt()).ceil() as usize;
    let ones = vec![1.0_f64; n];

    let (charge, outcome) = solve_pcg(&matrix, &ones, opts.rel_tol, max_iter)?;
    let mut charge = charge;
    let mut iterations = outcome.iterations;
    let mut projected = false;

    if opts.nonneg_projection {
        let (c, extra) = project_nonnegative(&matrix, charge, opts.rel_tol, max_iter)?;
        charge = c;
        iterations += extra;
        projected = true;
    }

    // Residuals against the all-ones target, restricted to nodes carrying
    // charge (projection pins the rest to zero by design).
    let mut au = vec![0.0; n];
    matrix.matvec(&charge, &mut au);
    let mut max_r = 0.0_f64;
    let mut sq = 0.0;
    let mut counted = 0usize;
    for i in 0..n {
        if projected && charge[i] == 0.0 {
            continue;
        }
        let r = (au[i] - 1.0).abs();
        max_r = max_r.max(r);
        sq += r * r;
        counted += 1;
    }
    let rms = (sq / counted.max(1) as f64).sqrt();

    let density: Vec<f64> = charge.iter().zip(q.weights()).map(|(c, w)| c / w).collect();
    EquilibriumSolution::finish(
        q.clone(),
        *spec,
        density,
        charge,
        max_r,
        rms,
        iterations,
        projected,
    )
}

/// Active-set nonnegativity projection: repeatedly zero the negative
/// charges and re-solve on the free set until none remain (or a round cap
/// is hit; remaining negativity is then reported by the caller's stats).
fn project_nonnegative(
    matrix: &DenseKernel,
    mut charge: Vec<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize), SolverError> {
    let n = matrix.n();
    let mut fixed = vec![false; n];
    let mut extra = 0usize;
    for _round in 0..50 {
        let mut newly = 0usize;
        for i in 0..n {
            if !fixed[i] && charge[i] < 0.0 {
                fixed[i] = true;
                newly += 1;
            }
        }
        if newly == 0 {
            return Ok((charge, extra));
        }
        let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
        if free.is_empty() {
            return Err(SolverError::NonPositiveMass(0.0));
        }
        let (sub_charge, iters) = solve_masked(matrix, &free, rel_tol, max_iter)?;
        extra += iters;
        charge = vec![0.0; n];
        for (k, &i) in free.iter().enumerate() {
            charge[i] = sub_charge[k];
        }
    }
    Ok((charge, extra))
}

/// Dense CG on the principal submatrix selected by `index`.
fn solve_masked(
    matrix: &DenseKernel,
    index: &[usize],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize), SolverError> {
    // Small systems only pay this copy when projection is requested.
    let k = index.len();
    let mut sub = vec![0.0_f64; k * k];
    for (a, &i) in index.iter().enumerate() {
        for (b, &j) in index.iter().enumerate() {
            sub[a * k + b] = matrix.get(i, j);
        }
    }
    let sub = super::kernel::DenseKernel::from_raw(k, sub);
    let ones = vec![1.0_f64; k];
    let (x, outcome) = solve_pcg(&sub, &ones, rel_tol, max_iter)?;
    Ok((x, outcome.iterations))
}
