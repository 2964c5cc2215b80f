use serde::Serialize;

use crate::geometry::{Quadrature, NODE_CAP};

use super::SolverError;

/// Riesz kernel `k(x, y) = |x - y|^{-s}` in ambient dimension `m`.
///
/// Local integrability requires `0 < s < m`.  Two instances matter here:
/// the planar half-fractional problem uses `m = 2, s = 1`, and the
/// Newtonian oracle in space uses `m = 3, s = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec {
    dim: usize,
    s: f64,
}

impl KernelSpec {
    pub fn new(dim: usize, s: f64) -> Result<Self, SolverError> {
        if dim != 2 && dim != 3 {
            return Err(SolverError::InvalidKernel { dim, s });
        }
        if !(s > 0.0 && s < dim as f64) {
            return Err(SolverError::InvalidKernel { dim, s });
        }
        Ok(Self { dim, s })
    }

    /// The kernel whose equilibrium problem realizes the 1/2-fractional
    /// capacity in dimension `dim`: exponent `dim - 1`.
    pub fn half_fractional(dim: usize) -> Result<Self, SolverError> {
        Self::new(dim, dim as f64 - 1.0)
    }

    /// Newtonian kernel in three dimensions (`s = 1`), the classical
    /// electrostatics oracle.
    pub fn newtonian3() -> Self {
        Self { dim: 3, s: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Kernel value at separation `r > 0`.
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        if self.s == 1.0 {
            1.0 / r
        } else if self.s == 2.0 {
            1.0 / (r * r)
        } else {
            r.powf(-self.s)
        }
    }

    /// Volume of the unit ball in the ambient dimension.
    fn unit_ball_volume(&self) -> f64 {
        match self.dim {
            2 => std::f64::consts::PI,
            _ => 4.0 * std::f64::consts::PI / 3.0,
        }
    }

    /// Diagonal entry for a cell of weight (volume) `w`: the kernel
    /// integrated over the ball of equal volume, divided by `w`.
    ///
    /// With `r = (w / omega_m)^{1/m}` the integral is
    /// `m omega_m r^{m-s} / (m - s)`, so the diagonal is that over `w`.
    /// For `m = 2, s = 1` this reduces to `2 sqrt(pi w) / w`; a cell of
    /// weight `pi` (unit disk) gives exactly 2.
    pub fn self_cell_diagonal(&self, w: f64) -> f64 {
        debug_assert!(w > 0.0);
        let m = self.dim as f64;
        let omega = self.unit_ball_volume();
        let r_eq = (w / omega).powf(1.0 / m);
        m * omega * r_eq.powf(m - self.s) / ((m - self.s) * w)
    }
}

/// Dense symmetric kernel matrix in row-major storage.
#[derive(Debug)]
pub struct DenseKernel {
    n: usize,
    data: Vec<f64>,
}

impl DenseKernel {
    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// `out = A x` with a fixed in-order accumulation per row, so results
    /// do not depend on how work might be scheduled.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            let mut acc = 0.0;
            for (a, v) in row.iter().zip(x) {
                acc += a * v;
            }
            *o = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }
}

/// Assemble the equilibrium kernel matrix for a quadrature:
/// `G[i][j] = k(x_i, x_j)` off the diagonal and the self-cell rule on it.
pub fn assemble_kernel(q: &Quadrature, spec: &KernelSpec) -> Result<DenseKernel, SolverError> {
    if q.dim() != spec.dim() {
        return Err(SolverError::DimensionMismatch {
            kernel_dim: spec.dim(),
            quadrature_dim: q.dim(),
        });
    }
    let n = q.len();
    if n > NODE_CAP {
        return Err(SolverError::TooLarge { nodes: n, cap: NODE_CAP });
    }
    let nodes = q.nodes();
    let weights = q.weights();
    let min_sep = 1e-9 * q.cell_size();
    let mut data = vec![0.0_f64; n * n];
    for i in 0..n {
        data[i * n + i] = spec.self_cell_diagonal(weights[i]);
        let xi = nodes[i];
        for j in i + 1..n {
            let xj = nodes[j];
            let dx = xi[0] - xj[0];
            let dy = xi[1] - xj[1];
            let dz = xi[2] - xj[2];
            let r = (dx * dx + dy * dy + dz * dz).sqrt();
            if r < min_sep {
                return Err(SolverError::CoincidentNodes { i, j });
            }
            let v = spec.eval(r);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::NonFiniteEntry);
    }
    Ok(DenseKernel { n, data })
}
